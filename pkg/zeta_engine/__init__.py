from pathlib import Path

PACKAGE_ROOT = Path(__file__).resolve().parent

from zeta_engine.arith import FieldSpec  # noqa: E402
from zeta_engine.laurent import LaurentPolynomial  # noqa: E402
from zeta_engine.oracle import brute_force_count, counts_from_zeta, verify  # noqa: E402
from zeta_engine.zeta import ZetaResult, compute_zeta, determine_precision, run_pipeline  # noqa: E402

__all__ = [
    "PACKAGE_ROOT",
    "FieldSpec",
    "LaurentPolynomial",
    "ZetaResult",
    "brute_force_count",
    "compute_zeta",
    "counts_from_zeta",
    "determine_precision",
    "run_pipeline",
    "verify",
]
