import pathlib
import sys

try:
    import gascap  # noqa: F401
except ImportError:  # running from a plain checkout without install
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))
