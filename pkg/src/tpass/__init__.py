"""Randomized truncated t-SVD of third-order tensors under the t-product."""

__version__ = "0.1.0"

from .errors import (DimensionMismatch, FormatError, MalformedSpectrum, PlanError, RankError,
                     TheoryPreconditionError, TPassError)
from .tensor import MaskTensor, Tensor3, fro_norm, psnr, psnr_standard, relative_error
from .fourier import SpectralTensor, fft_tubes, ifft_tubes
from .tproduct import identity_tensor, tprod, ttranspose
from .linalg import TqrFactors, TsvdFactors, orth, t_qr, truncated_tsvd
from .sketch import (PassCountedSource, SketchPlan, passes_used, rand_svd_passes,
                     rand_svd_subspace, rand_tsvd_passes, rand_tsvd_subspace, run_plan)
from .bounds import BoundReport, monte_carlo_validate, spectral_profile
from .completion import CompletionConfig, CompletionReport, complete
from .synth import synth_image, synth_lowrank
from .io import load_image, load_tensor, save_image, save_tensor

__all__ = [name for name in dir() if not name.startswith("_")]
