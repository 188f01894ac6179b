"""
Tests for the logging helpers.
"""

from src.utils.logger import ChainLogger, ProgressLogger, setup_logger


def test_run_log_receives_debug_records(tmp_path):
    log_file = tmp_path / "logs" / "fit.log"
    logger = setup_logger("test_run_log", level="WARNING", log_file=log_file)
    logger.debug("proposal scale adjusted")
    text = log_file.read_text()
    assert "DEBUG" in text
    assert "proposal scale adjusted" in text


def test_chain_prefix(tmp_path):
    log_file = tmp_path / "chain.log"
    logger = setup_logger("test_chain_prefix", level="WARNING", log_file=log_file)
    ChainLogger(logger, 3).info("kept 10 state(s)")
    assert "[chain 3] kept 10 state(s)" in log_file.read_text()


def test_progress_steps(tmp_path):
    log_file = tmp_path / "progress.log"
    progress = ProgressLogger(setup_logger("test_progress", level="WARNING", log_file=log_file), total_steps=2)
    progress.step("Loading observations")
    progress.step("Running chains")
    assert progress.complete("Done") >= 0.0
    text = log_file.read_text()
    assert "[1/2] Loading observations" in text
    assert "[2/2] Running chains" in text
    assert "step 2 took" in text


def test_setup_twice_replaces_handlers():
    logger = setup_logger("test_replace")
    setup_logger("test_replace")
    assert len(logger.handlers) == 1
