import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any
from typing import Dict
from typing import Mapping
from typing import Optional
from typing import Union

import yaml

from spion_mc_testbed.channel.config import ChannelParams
from spion_mc_testbed.channel.config import ImpulseModel
from spion_mc_testbed.core.config import TestbedConfig
from spion_mc_testbed.errors import InvalidConfigError
from spion_mc_testbed.frontend.config import FrontendParams

_LOGGER = logging.getLogger(__name__)

CHANNEL_SECTION = "channel"
FRONTEND_SECTION = "frontend"
CHANNEL_KEYS = ("impulse_model", "clearance_time_constant", "dilution_factor", "gamma_shape")


@dataclass(frozen=True)
class Settings:
    """Everything a run needs: testbed config, channel model options and receiver parameters."""

    testbed: TestbedConfig = dataclasses.field(default_factory=TestbedConfig)
    channel_options: Mapping[str, Any] = dataclasses.field(default_factory=dict)
    frontend: FrontendParams = dataclasses.field(default_factory=FrontendParams)

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams.from_config(self.testbed, **self.channel_options)

    def with_overrides(self, seed: Optional[int] = None, noise: Optional[bool] = None) -> "Settings":
        testbed = self.testbed if seed is None else self.testbed.replace(rng_seed=seed)
        frontend = self.frontend
        if noise is False:
            frontend = frontend.without_noise()
        return dataclasses.replace(self, testbed=testbed, frontend=frontend)

    def snapshot(self) -> Dict[str, Any]:
        return {
            "testbed": self.testbed.as_dict(),
            CHANNEL_SECTION: self.channel.as_dict(),
            FRONTEND_SECTION: self.frontend.as_dict(),
        }


def _check_keys(section: str, given: Mapping[str, Any], allowed) -> None:
    unknown = sorted(set(given) - set(allowed))
    if unknown:
        raise InvalidConfigError(f"unknown {section} keys: {unknown}")


def settings_from_dict(raw: Mapping[str, Any]) -> Settings:
    raw = dict(raw or {})
    channel_raw = dict(raw.pop(CHANNEL_SECTION, None) or {})
    frontend_raw = dict(raw.pop(FRONTEND_SECTION, None) or {})

    _check_keys("testbed", raw, [f.name for f in dataclasses.fields(TestbedConfig)])
    _check_keys(CHANNEL_SECTION, channel_raw, CHANNEL_KEYS)
    _check_keys(FRONTEND_SECTION, frontend_raw, [f.name for f in dataclasses.fields(FrontendParams)])

    if "impulse_model" in channel_raw:
        try:
            channel_raw["impulse_model"] = ImpulseModel(channel_raw["impulse_model"])
        except ValueError as exc:
            raise InvalidConfigError(f"unknown impulse_model {channel_raw['impulse_model']!r}") from exc

    try:
        settings = Settings(
            testbed=TestbedConfig(**raw),
            channel_options=channel_raw,
            frontend=FrontendParams(**frontend_raw),
        )
        # channel options are validated eagerly
        settings.channel
    except TypeError as exc:
        raise InvalidConfigError(str(exc)) from exc

    return settings


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    """
    Reads a YAML configuration.

    Top-level keys are ``TestbedConfig`` fields; optional ``channel:`` and ``frontend:`` mappings configure the
    channel model and the receiver. Missing keys keep their defaults; no path means all defaults.
    """
    if path is None:
        return Settings()

    path = Path(path)
    with path.open("r", encoding="utf-8") as config_file:
        try:
            raw = yaml.safe_load(config_file)
        except yaml.YAMLError as exc:
            raise InvalidConfigError(f"{path}: not a valid YAML document ({exc})") from exc
    if raw is not None and not isinstance(raw, dict):
        raise InvalidConfigError(f"{path}: top level of the configuration must be a mapping")

    _LOGGER.info(f"loaded configuration from {path}")
    return settings_from_dict(raw or {})


def dump_frontend(params: FrontendParams, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as output_file:
        yaml.safe_dump({FRONTEND_SECTION: params.as_dict()}, output_file, sort_keys=False)
    return path
