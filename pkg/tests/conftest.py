def pytest_configure(config):
    config.addinivalue_line("markers", "slow: sweeps over larger genera; deselect with -m 'not slow'")
