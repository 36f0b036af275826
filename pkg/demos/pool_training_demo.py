"""
A small training run against a rated opponent pool
==================================================

Trains a depth-2 connect4 evaluator for a few hundred games against a mixed
pool, then checks the result against an untrained copy.  Takes around a
minute on one core.
"""

import tempfile
from pathlib import Path

from tdsearch.arena import (
    FixedAgent,
    OpponentPool,
    RandomAgent,
    SearchAgent,
    head_to_head,
    train_online,
)
from tdsearch.evaluation import feature_set
from tdsearch.games import GAMES
from tdsearch.learner import AlphaSchedule, LearnerConfig
from tdsearch.presets import preset_weights

game = GAMES["connect4"]
fs = feature_set("connect4")

pool = OpponentPool(opponents=(
    RandomAgent("rnd"),
    FixedAgent("base-d1", fs, preset_weights(fs, "baseline"), 1),
    FixedAgent("base-d2", fs, preset_weights(fs, "baseline"), 2),
), matching="uniform")

agent = SearchAgent("learner", fs, fs.zero_weights(), 2, tie_mode="random")
cfg = LearnerConfig(lambda_=0.7, alpha=AlphaSchedule(base=0.05),
                    squash=fs.squash_config())

out = Path(tempfile.mkdtemp(prefix="pool-demo-"))
result = train_online(game, agent, pool, cfg, 300, seed=3, out_dir=out)

print(f"trained 300 games; final rating {result.table.rating('learner'):.0f}")
print("weights by feature:")
for name, value in zip(fs.names, result.weights.values):
    print(f"  {name:16s} {value:+.3f}")

# the run directory holds everything needed to reproduce or replay the run
print("artifacts:", sorted(p.name for p in out.iterdir()))

trained = FixedAgent("trained", fs, result.weights, 2, tie_mode="random")
fresh = FixedAgent("fresh", fs, fs.zero_weights(), 2, tie_mode="random")
score, tally = head_to_head(game, trained, fresh, 100, seed=5)
print(f"trained vs untrained over 100 games: {score:.2f} ({tally})")
