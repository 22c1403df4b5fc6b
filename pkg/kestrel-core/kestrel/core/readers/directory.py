import glob
import os
from pathlib import Path
from typing import List, Optional

from kestrel.core.detectors import GrayImage
from kestrel.core.readers.base import BaseReader
from kestrel.core.readers.graymap import GraymapReader


class DirectoryReader(BaseReader):
    """
    Directory reader.

    Reads every graymap frame of a directory in file-name order, optionally
    descending into subdirectories.

    Args:
        required_exts (List[str], optional): File extensions to load. Defaults to `[".pgm"]`.
        recursive (bool, optional): Whether to search subdirectories. Defaults to `False`.

    Example:
        .. code-block:: python

            from kestrel.core.readers import DirectoryReader

            frames = DirectoryReader().load_data("frames/")
    """

    required_exts: List[str] = [".pgm"]
    recursive: Optional[bool] = False

    @classmethod
    def class_name(cls) -> str:
        return "DirectoryReader"

    def files(self, input_dir: str) -> List[str]:
        if not os.path.isdir(input_dir):
            raise ValueError(f"`{input_dir}` is not a valid directory.")

        pattern_prefix = "**/*" if self.recursive else "*"
        files = []
        for extension in self.required_exts:
            files.extend(
                glob.glob(os.path.join(Path(input_dir), pattern_prefix + extension), recursive=self.recursive),
            )
        return sorted(files)

    def load_data(self, input_dir: str) -> List[GrayImage]:
        """
        Args:
            input_dir (str): Directory path from which to load the frames.

        Returns:
            List[GrayImage]: Frames sorted by file path.
        """
        reader = GraymapReader()
        return [reader.load_data(f) for f in self.files(input_dir)]
