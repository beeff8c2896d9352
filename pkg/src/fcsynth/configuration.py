# SPDX-License-Identifier: MIT

from typing import Optional, TypedDict

import platformdirs

APP_NAME = "fcsynth"

CONFIG_PATH = platformdirs.user_config_path(APP_NAME)
APP_CONFIG_PATH = CONFIG_PATH / "config.yaml"

DEFAULT_TOKEN_ENV = "FCSYNTH_API_KEY"


class Configuration(TypedDict):
    llm_endpoint: Optional[str]
    llm_model: str
    llm_temperature: float
    llm_max_tokens: int
    llm_timeout: float
    llm_max_retries: int
    llm_max_in_flight: int
    llm_token_env: str
    llm_response_path: str
    rollout_temperature: float
    default_jobs: Optional[int]
    log_level: str


def get_default_configuration() -> Configuration:
    return {
        "llm_endpoint": None,
        "llm_model": "gemini-1.5-pro-002",
        "llm_temperature": 0.0,
        "llm_max_tokens": 2048,
        "llm_timeout": 60.0,
        "llm_max_retries": 2,
        "llm_max_in_flight": 8,
        "llm_token_env": DEFAULT_TOKEN_ENV,
        "llm_response_path": "choices.0.message.content",
        "rollout_temperature": 1.0,
        "default_jobs": None,
        "log_level": "WARNING",
    }
