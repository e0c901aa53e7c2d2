import json
import logging

import numpy as np

from src.glass_multistability.logging_utils import (
    format_details,
    log_error,
    log_oracle_mismatch,
    log_warning,
)


def test_details_render_as_json_with_str_fallback():
    assert format_details() == ""
    assert format_details({}) == ""
    rendered = format_details({"set": [1, 2], "count": np.int64(3)})
    assert rendered.startswith(" ")
    assert json.loads(rendered) == {"set": [1, 2], "count": "3"}


def test_warning_carries_component_and_type(caplog):
    with caplog.at_level(logging.WARNING, logger="glass_multistability"):
        log_warning("Dynamics", "Chatter", "Repeated switching", {"state": [0.0, 1.0]})
    message = caplog.records[-1].getMessage()
    assert message.startswith("[Dynamics] WARNING - Chatter: Repeated switching")
    assert message.endswith('{"state": [0.0, 1.0]}')


def test_error_with_exception_logs_the_traceback(caplog):
    try:
        raise ValueError("bad set")
    except ValueError as exc:
        with caplog.at_level(logging.ERROR, logger="glass_multistability"):
            log_error("Cli", "Usage", "Cannot parse", exception=exc)
    first, trace = [record.getMessage() for record in caplog.records[-2:]]
    assert first == "[Cli] ERROR - Usage: Cannot parse | ValueError: bad set"
    assert trace.startswith("[Cli] Traceback: ")
    assert "raise ValueError" in trace


def test_oracle_mismatch_names_the_module(caplog):
    with caplog.at_level(logging.ERROR, logger="glass_multistability"):
        log_oracle_mismatch("counts", {"n": 3}, 4, 5)
    message = caplog.records[-1].getMessage()
    assert message.startswith("[Oracle] ERROR - countsMismatch: Oracle comparison failed for counts")
    assert '"expected": 4' in message and '"got": 5' in message
