"""Text-to-EMBF extraction bridge with stub and Hugging Face encoders."""

from .compat import CompatReport, verify_compat
from .embf import EmbfFormatError, read_embf, write_embf
from .jobs import ExtractionJob, run_extraction
from .pooling import default_pooling, last_token_pool, mean_pool
from .stub import StubEncoder

__version__ = "0.1.0"

__all__ = [
    "CompatReport",
    "EmbfFormatError",
    "ExtractionJob",
    "StubEncoder",
    "default_pooling",
    "last_token_pool",
    "mean_pool",
    "read_embf",
    "run_extraction",
    "verify_compat",
    "write_embf",
]
