"""Synthesis of composers over libraries of probabilistic components."""
from .core import (AlphabetMismatch, CompSynthError, Component, Composer, DPW,
                   ExitControlRelation, Lasso, Library, Rational, TypeMismatch,
                   WidthExceeded)
from .games import (DisabledAction, Mdp, StochasticGame, StrategyTransducer,
                    almost_sure_parity, apply_strategy, mdp_almost_sure_parity,
                    mdp_parity_value, parity_value)

__version__ = "0.1.0"
