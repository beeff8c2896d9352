# SPDX-License-Identifier: MIT

from copy import deepcopy
from typing import Any, Optional, cast

from yaml import dump, load

try:
    from yaml import CDumper as Dumper
    from yaml import CLoader as Loader  # noqa: F401
except ImportError:
    from yaml import Dumper, Loader  # type: ignore[assignment]

from fcsynth import configuration
from fcsynth.errors import InputValidationError


class ConfigurationRepository:
    def __init__(self) -> None:
        self._config: Optional[configuration.Configuration] = None
        self.is_dirty = False

    @property
    def config(self) -> configuration.Configuration:
        if self._config is None:
            self.__load_data()
        if self._config is None:
            raise ValueError()
        return self._config

    def __load_data(self) -> None:
        defaults = configuration.get_default_configuration()
        if not configuration.APP_CONFIG_PATH.is_file():
            # Config doesn't exist yet, use defaults
            self._config = defaults
            return

        raw = load(configuration.APP_CONFIG_PATH.read_text(), Loader=Loader)
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise InputValidationError(
                f"configuration file {configuration.APP_CONFIG_PATH} is not a mapping"
            )

        # Migration: back-fill any key added since the file was written
        for key, value in defaults.items():
            if key not in raw:
                raw[key] = value
        self._config = cast(configuration.Configuration, raw)

    def __save_data(self, config: configuration.Configuration) -> None:
        configuration.APP_CONFIG_PATH.parent.mkdir(parents=True, exist_ok=True)
        configuration.APP_CONFIG_PATH.write_text(dump(dict(config), Dumper=Dumper))

    def flush(self) -> bool:
        if self._config is not None and self.is_dirty:
            self.__save_data(self._config)
            self.is_dirty = False
            return True
        return False

    def get_config(self) -> configuration.Configuration:
        return deepcopy(self.config)

    def update_config(self, **changes: Any) -> None:
        known = configuration.get_default_configuration().keys()
        for key, value in changes.items():
            if key not in known:
                raise KeyError(f"unknown configuration key: {key}")
            if value is None:
                continue
            self.is_dirty = True
            self.config[key] = value  # type: ignore[literal-required]

    def reset_key(self, key: str) -> None:
        defaults = configuration.get_default_configuration()
        if key not in defaults:
            raise KeyError(f"unknown configuration key: {key}")
        self.is_dirty = True
        self.config[key] = defaults[key]  # type: ignore[literal-required]

    def reload(self) -> None:
        self._config = None
        self.is_dirty = False


CONFIGURATION_REPO = ConfigurationRepository()
