import numpy as np
import pytest

from curvspec.geometry import (
    ConformalScaling,
    ConstantCurvature,
    FamilyGF,
    HypersurfaceGf,
    ProductWithFlat,
    WarpedProduct,
)
from curvspec.polynomial import PolySpec

from acceptance_log import RESULTS


def all_families():
    """Named instances covering every family variant."""
    gF = FamilyGF.default(2)
    return {
        "const(1;0,4)": ConstantCurvature(1.0, 0, 4),
        "const(-0.5;2,2)": ConstantCurvature(-0.5, 2, 2),
        "flat(1,3)": ConstantCurvature(0.0, 1, 3),
        "warped S2": WarpedProduct(1, 1.0, 1.0, 1.0),
        "warped base (2,1)": WarpedProduct(1, 1.0, 1.0, 1.0, 2, 1),
        "warped eps=-1": WarpedProduct(-1, 0.5, 1.0, 2.0, 1, 2),
        "gf definite p=2": HypersurfaceGf.definite_default(2),
        "gf definite p=3": HypersurfaceGf.definite_default(3),
        "gf indefinite p=3": HypersurfaceGf.indefinite_default(3),
        "gF s=2": gF,
        "gF s=3": FamilyGF.default(3),
        "gf x R^(1,1)": ProductWithFlat(HypersurfaceGf.definite_default(2), 1, 1),
        "conformal gF": ConformalScaling(gF, PolySpec.parse("1 + (u1/10)^2", gF.coordinates)),
    }


FAMILIES = all_families()


@pytest.fixture(params=sorted(FAMILIES), ids=str)
def family(request):
    return FAMILIES[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, line = RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {line}")
