import transformers


def pytest_configure(config):
    # keep checkpoint save/load progress bars out of test output
    transformers.utils.logging.disable_progress_bar()
    transformers.utils.logging.set_verbosity_error()
