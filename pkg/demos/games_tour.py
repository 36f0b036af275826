"""
A quick tour of the bundled games
=================================
"""

import numpy as np

from tdsearch.games import GAMES

# Every game speaks the same protocol: states render to text, moves have
# string names, and outcomes are scored for White.
for game_id in ("tictactoe", "connect4", "minichess"):
    game = GAMES[game_id]
    s = game.initial_state()
    print(f"--- {game_id} ---")
    print("initial:", game.to_text(s))
    moves = game.legal_actions(s)
    print(f"{len(moves)} opening moves, e.g.",
          ", ".join(game.action_to_str(m) for m in moves[:4]))

    # play a short random game and report how it ends
    rng = np.random.default_rng(7)
    plies = 0
    while not game.is_terminal(s):
        acts = game.legal_actions(s)
        s = game.apply(s, acts[int(rng.integers(len(acts)))])
        plies += 1
    reward = game.outcome(s).for_side(game.initial_state().side_to_move)
    print(f"random playout: {plies} plies, first player's reward {reward:+.0f}")
    print("final:", game.to_text(s))
    print()
