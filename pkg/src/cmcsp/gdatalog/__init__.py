"""Datalog with GF(2) equation predicates: syntax, static checks, evaluation and generated programs."""

from __future__ import annotations

from .analysis import *  # noqa: F401,F403
from .analysis import __all__ as _analysis_all
from .engine import *  # noqa: F401,F403
from .engine import __all__ as _engine_all
from .programs import *  # noqa: F401,F403
from .programs import __all__ as _programs_all
from .syntax import *  # noqa: F401,F403
from .syntax import __all__ as _syntax_all

__all__ = _syntax_all + _analysis_all + _engine_all + _programs_all
