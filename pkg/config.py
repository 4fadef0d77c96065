# ternary_navigator/config.py

import logging
import os
from dataclasses import dataclass, fields
from typing import Mapping, Optional

from dotenv import dotenv_values, load_dotenv

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

SUITES = ('examples', 'tables', 'stable', 'appendix', 'family', 'chains')
REPORT_FORMATS = ('json', 'markdown', 'html')

_TRUE = {'1', 'true', 'yes', 'on'}


def load_environment() -> bool:
    """Loads .env next to this file, then from the working directory."""
    dotenv_path = os.path.join(os.path.dirname(__file__), '.env')
    alt_dotenv_path = '.env'
    loaded_env = load_dotenv(dotenv_path=dotenv_path, override=True)
    if not loaded_env:
        logger.debug(f"Did not find .env in {dotenv_path}, trying {alt_dotenv_path}...")
        loaded_env = load_dotenv(dotenv_path=alt_dotenv_path, override=True)
    if loaded_env:
        logger.debug("Successfully loaded .env file.")
    else:
        logger.warning("Could not find .env file in standard locations. Using defaults and environment.")
    return loaded_env


@dataclass
class NavigatorSettings:
    max_disc: int = 100000
    threads: int = 1
    force_oracle: bool = False
    force_formula: bool = False
    verify_suites: tuple[str, ...] = SUITES
    stable_suite_max_disc: int = 500
    report_format: str = 'json'

    @classmethod
    def from_mapping(cls, values: Mapping[str, Optional[str]]) -> "NavigatorSettings":
        """Builds settings from TERNARY_* keys; unknown keys are ignored, missing keys keep defaults."""
        settings = cls()

        def get(key):
            value = values.get(key)
            return None if value is None or str(value).strip() == '' else str(value).strip()

        if get('TERNARY_MAX_DISC'):
            settings.max_disc = int(get('TERNARY_MAX_DISC'))
        if get('TERNARY_THREADS'):
            settings.threads = max(1, int(get('TERNARY_THREADS')))
        if get('TERNARY_FORCE_ORACLE'):
            settings.force_oracle = get('TERNARY_FORCE_ORACLE').lower() in _TRUE
        if get('TERNARY_FORCE_FORMULA'):
            settings.force_formula = get('TERNARY_FORCE_FORMULA').lower() in _TRUE
        if get('TERNARY_VERIFY_SUITES'):
            raw = get('TERNARY_VERIFY_SUITES').lower()
            settings.verify_suites = SUITES if raw == 'all' else tuple(
                s.strip() for s in raw.split(',') if s.strip() in SUITES)
        if get('TERNARY_STABLE_SUITE_MAX_DISC'):
            settings.stable_suite_max_disc = int(get('TERNARY_STABLE_SUITE_MAX_DISC'))
        if get('TERNARY_REPORT_FORMAT'):
            fmt = get('TERNARY_REPORT_FORMAT').lower()
            if fmt in REPORT_FORMATS:
                settings.report_format = fmt
            else:
                logger.warning(f"Unknown report format '{fmt}', keeping '{settings.report_format}'.")
        return settings

    def override(self, **flags) -> "NavigatorSettings":
        """Copy with every flag that is not None applied."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update({k: v for k, v in flags.items() if v is not None and k in values})
        return NavigatorSettings(**values)

    def to_json(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v) for f in fields(self)}


def load_settings(config_path: Optional[str] = None, **flags) -> NavigatorSettings:
    """Environment, then the optional key=value config file, then command-line flags."""
    merged: dict[str, Optional[str]] = {k: v for k, v in os.environ.items() if k.startswith('TERNARY_')}
    if config_path:
        if not os.path.exists(config_path):
            raise FileNotFoundError(f"Config file {config_path} does not exist.")
        merged.update(dotenv_values(config_path))
        logger.info(f"Loaded settings from {config_path}.")
    return NavigatorSettings.from_mapping(merged).override(**flags)
