import pytest


@pytest.fixture(params=["python", "compiled"])
def backend(request):
    """Run backend-sensitive tests against both kernel implementations."""
    from rumornet import available_backends

    if request.param not in available_backends():
        pytest.skip(f"backend {request.param} not built")
    return request.param
