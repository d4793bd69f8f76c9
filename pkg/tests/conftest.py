import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

import certify  # noqa: E402
import groebner  # noqa: E402
import polycore  # noqa: E402
import settings  # noqa: E402


@pytest.fixture(autouse=True)
def _restore_caps():
    """Tests may tighten caps or switch on audit; put everything back."""
    saved_groebner = dict(groebner.CAP)
    saved_certify = dict(certify.CAP)
    saved_audit = dict(settings.AUDIT)
    yield
    groebner.configure(saved_groebner["max_spairs"], saved_groebner["advisory_prime"])
    certify.configure(saved_certify["saturation_bound"])
    polycore.set_debug_validation(False)
    settings.AUDIT.update(saved_audit)


@pytest.fixture
def sessions_dir() -> Path:
    return ROOT / "sessions"


@pytest.fixture
def test_sessions_dir() -> Path:
    return ROOT / "tests" / "sessions"
