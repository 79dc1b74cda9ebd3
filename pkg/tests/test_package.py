import lucas_wavelet


def test_public_modules():
    for name in lucas_wavelet.__all__:
        assert isinstance(name, str)
        assert hasattr(lucas_wavelet, name)


def test_star_import():
    namespace = {}
    exec("from lucas_wavelet import *", namespace)
    assert set(lucas_wavelet.__all__) <= set(namespace)
