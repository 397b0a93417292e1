"""Standard vs. weighted training across Gm/Pn splits (takes about half a minute)."""

from ecocnet import harness
from ecocnet.dataset import generate_synthetic

cfg = harness.ExperimentConfig.from_dict({
    "dataset": {"synthetic": {}},
    "code": {"method": "bch", "length": 31},
    "split": {"train_per_class": 6, "test_per_class": 5, "split_count": 10},
})
data = generate_synthetic()
rows = harness.compare_rows(cfg, data)
print(harness.text_table(("Method", *cfg.columns), rows))
