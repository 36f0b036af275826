"""Connect-4 on the standard 7x6 board, bitboard representation.

Each column occupies 7 bits (6 playable rows plus a guard bit that absorbs
the carry when a column is full); bit index = col * 7 + row, row 0 at the
bottom.  A state stores the side-to-move's stones and the union of all
stones, so the encoding is mover-relative by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from tdsearch.games.base import (
    DRAW,
    Game,
    IllegalMoveError,
    NonTerminalError,
    Outcome,
    Side,
)

COLS = 7
ROWS = 6
STRIDE = ROWS + 1  # bits per column, including the guard row

COLUMN_MASK = tuple(((1 << ROWS) - 1) << (c * STRIDE) for c in range(COLS))
BOTTOM_BIT = tuple(1 << (c * STRIDE) for c in range(COLS))
FULL_MASK = sum(COLUMN_MASK)
BOTTOM_MASK = sum(BOTTOM_BIT)

CENTER_MASK = COLUMN_MASK[3]
LOW_HALF_MASK = sum(0b111 << (c * STRIDE) for c in range(COLS))
EVEN_ROW_MASK = sum(0b010101 << (c * STRIDE) for c in range(COLS))
ODD_ROW_MASK = FULL_MASK ^ EVEN_ROW_MASK

# Shift distances: vertical, horizontal, the two diagonals.
DIRECTIONS = (1, STRIDE, STRIDE - 1, STRIDE + 1)

# Center-first column order; tends to tighten alpha-beta windows early.
COLUMN_ORDER = (3, 2, 4, 1, 5, 0, 6)


def has_alignment(stones: int) -> bool:
    """True if stones contains four in a row in any direction."""
    for s in DIRECTIONS:
        pairs = stones & (stones >> s)
        if pairs & (pairs >> (2 * s)):
            return True
    return False


def winning_squares(stones: int, filled: int) -> int:
    """Empty playable-board squares that would complete a four for stones."""
    r = (stones << 1) & (stones << 2) & (stones << 3)  # vertical
    for s in DIRECTIONS[1:]:
        p = (stones << s) & (stones << (2 * s))
        r |= p & (stones << (3 * s))
        r |= p & (stones >> s)
        p = (stones >> s) & (stones >> (2 * s))
        r |= p & (stones >> (3 * s))
        r |= p & (stones << s)
    return r & FULL_MASK & ~filled


@dataclass(frozen=True)
class ConnectFourState:
    mover: int   # stones of the side to move
    filled: int  # all stones

    @property
    def ply(self) -> int:
        return self.filled.bit_count()

    @property
    def side_to_move(self) -> Side:
        return Side.WHITE if self.ply % 2 == 0 else Side.BLACK

    @property
    def opponent_stones(self) -> int:
        return self.filled ^ self.mover


class ConnectFour(Game):
    game_id = "connect4"

    def initial_state(self) -> ConnectFourState:
        return ConnectFourState(0, 0)

    def legal_actions(self, state: ConnectFourState):
        if has_alignment(state.opponent_stones):
            return []
        playable = (state.filled + BOTTOM_MASK) & FULL_MASK
        return [c for c in COLUMN_ORDER if playable & COLUMN_MASK[c]]

    def apply(self, state: ConnectFourState, action: int) -> ConnectFourState:
        if not isinstance(action, int) or not 0 <= action < COLS:
            raise IllegalMoveError(f"bad column: {action!r}")
        if has_alignment(state.opponent_stones):
            raise IllegalMoveError("game already decided")
        cell = (state.filled + BOTTOM_BIT[action]) & COLUMN_MASK[action]
        if not cell:
            raise IllegalMoveError(f"column {action} is full")
        return ConnectFourState(state.opponent_stones, state.filled | cell)

    def is_terminal(self, state: ConnectFourState) -> bool:
        return has_alignment(state.opponent_stones) or state.filled == FULL_MASK

    def outcome(self, state: ConnectFourState) -> Outcome:
        # Only the player who just moved can have completed a four.
        if has_alignment(state.opponent_stones):
            return Outcome(float(state.side_to_move.opponent.sign))
        if state.filled == FULL_MASK:
            return DRAW
        raise NonTerminalError("position is not terminal")

    # -- text round trip: rows top-down, 'X' White, 'O' Black ------------

    def to_text(self, state: ConnectFourState) -> str:
        white = state.mover if state.side_to_move is Side.WHITE else state.opponent_stones
        black = state.filled ^ white
        rows = []
        for r in range(ROWS - 1, -1, -1):
            row = []
            for c in range(COLS):
                bit = 1 << (c * STRIDE + r)
                row.append("X" if white & bit else "O" if black & bit else ".")
            rows.append("".join(row))
        return "/".join(rows)

    def from_text(self, text: str) -> ConnectFourState:
        rows = text.strip().split("/")
        if len(rows) != ROWS or any(len(r) != COLS for r in rows):
            raise ValueError(f"bad connect4 text: {text!r}")
        white = black = 0
        for i, row in enumerate(rows):
            r = ROWS - 1 - i
            for c, ch in enumerate(row):
                bit = 1 << (c * STRIDE + r)
                if ch == "X":
                    white |= bit
                elif ch == "O":
                    black |= bit
                elif ch != ".":
                    raise ValueError(f"bad cell char {ch!r}")
        nw, nb = white.bit_count(), black.bit_count()
        if nb not in (nw, nw - 1):
            raise ValueError(f"unreachable stone counts in {text!r}")
        filled = white | black
        for c in range(COLS):
            col = (filled & COLUMN_MASK[c]) >> (c * STRIDE)
            if col & (col + 1):  # stones must be a contiguous stack from the floor
                raise ValueError(f"floating stones in column {c}")
        mover = white if nw == nb else black
        return ConnectFourState(mover, filled)

    def action_to_str(self, action: int) -> str:
        return str(action)

    def action_from_str(self, text: str) -> int:
        return int(text)

    def mirror_lr(self, state: ConnectFourState) -> ConnectFourState:
        """Reflect the board left-right (column c -> 6-c)."""

        def flip(mask: int) -> int:
            out = 0
            for c in range(COLS):
                col = (mask >> (c * STRIDE)) & ((1 << STRIDE) - 1)
                out |= col << ((COLS - 1 - c) * STRIDE)
            return out

        return ConnectFourState(flip(state.mover), flip(state.filled))
