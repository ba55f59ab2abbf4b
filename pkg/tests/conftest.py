import pytest

from stafermi import _kernel


@pytest.fixture
def keep_backend():
    """Restore the kernel backend after a test that switches it."""
    before = _kernel.BACKEND
    yield
    _kernel.set_backend(before)
