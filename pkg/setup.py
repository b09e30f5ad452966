"""Build hook that compiles the Rust curve backend with cargo."""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

CRATE_DIR = Path(__file__).resolve().parent / "native" / "curve"


class CargoExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CargoBuildExt(build_ext):
    def build_extension(self, ext: Extension) -> None:
        subprocess.run(["cargo", "build", "--release"], cwd=CRATE_DIR, check=True)
        release = CRATE_DIR / "target" / "release"
        for candidate in ("libbltc_curve.so", "libbltc_curve.dylib", "bltc_curve.dll"):
            built = release / candidate
            if built.exists():
                break
        else:
            raise FileNotFoundError(f"cargo produced no library under {release}")
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built, dest)


setup(
    ext_modules=[CargoExtension("bltc._curve")],
    cmdclass={"build_ext": CargoBuildExt},
)
