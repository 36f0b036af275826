"""Shared game-core types.

Games are deterministic, two-player, zero-sum, perfect information.  States
are immutable values: applying an action returns a fresh state and never
mutates the argument.  Rewards are always reported from White's point of
view; use Outcome.for_side to flip perspective.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Side(enum.Enum):
    WHITE = 1
    BLACK = -1

    @property
    def opponent(self) -> "Side":
        return Side.BLACK if self is Side.WHITE else Side.WHITE

    @property
    def sign(self) -> int:
        """+1 for White, -1 for Black."""
        return self.value


class IllegalMoveError(ValueError):
    """Raised by apply() when the action is not legal in the given state."""


class NonTerminalError(ValueError):
    """Raised by outcome() when the state is not terminal."""


@dataclass(frozen=True)
class Outcome:
    """Terminal result, stored from White's perspective: +1 / 0 / -1."""

    reward: float

    def for_side(self, side: Side) -> float:
        return self.reward * side.sign


WIN = Outcome(1.0)
DRAW = Outcome(0.0)
LOSS = Outcome(-1.0)


class Game:
    """Interface the engine expects from a game implementation.

    Subclasses provide pure functions over immutable states.  Transitions are
    deterministic: apply(s, a) is a function of its arguments alone, so any
    recorded action sequence replays to field-identical states.  Stochastic
    games are out of scope.
    """

    game_id: str = ""

    def initial_state(self):
        raise NotImplementedError

    def legal_actions(self, state):
        """Ordered list of legal actions; deterministic order."""
        raise NotImplementedError

    def apply(self, state, action):
        """Successor state; raises IllegalMoveError on an illegal action."""
        raise NotImplementedError

    def apply_trusted(self, state, action):
        """Like apply(), for actions known to come from legal_actions(state).

        Games may override this to skip validation on the search hot path.
        """
        return self.apply(state, action)

    def is_terminal(self, state) -> bool:
        raise NotImplementedError

    def outcome(self, state) -> Outcome:
        """White-perspective result of a terminal state."""
        raise NotImplementedError

    # -- text round-trip interfaces -------------------------------------

    def to_text(self, state) -> str:
        raise NotImplementedError

    def from_text(self, text: str):
        raise NotImplementedError

    def action_to_str(self, action) -> str:
        raise NotImplementedError

    def action_from_str(self, text: str):
        raise NotImplementedError

    # -- move-list trace format: one action token per line ---------------

    def moves_to_text(self, actions) -> str:
        return "\n".join(self.action_to_str(a) for a in actions) + "\n"

    def moves_from_text(self, text: str):
        return [self.action_from_str(line) for line in text.split() if line]

    def replay(self, actions, state=None):
        """Fold apply() over an action sequence from state (default initial)."""
        s = self.initial_state() if state is None else state
        for a in actions:
            s = self.apply(s, a)
        return s
