from kestrel.core.utils.linalg import (
    as_matrix,
    as_vector,
    clamp_psd,
    symmetrize,
)

__all__ = ["as_matrix", "as_vector", "clamp_psd", "symmetrize"]
