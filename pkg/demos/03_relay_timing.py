# Relay timing: how far apart are benign and relayed inter-frame gaps?
import numpy as np
from scipy.stats import truncnorm

from cechain.timebound import (
    Jitter, TimingParams, calibrate_t_in, evaluate_detector, sample_benign, sample_relayed,
    split, train_detector,
)

benign_p = TimingParams()
relay_p = TimingParams(t_other_a=Jitter(3.0, 0.0))
data = sample_benign(benign_p, 2000, 0) + sample_relayed(relay_p, 2000, 1)
train, test = split(data, 0.3, 0)

print("t_in from benign gaps (mean + 4 sd):", round(calibrate_t_in([s for s in data if s.label == "benign"]), 3))
for kind in ("threshold", "forest"):
    m = evaluate_detector(train_detector(train, kind, 0), test)
    print(f"{kind:9s} acc {m.accuracy:.3f}  tpr {m.tpr:.3f}  tnr {m.tnr:.3f}  f1 {m.f1:.3f}")

# Best any detector can do on a single gap: both classes share the truncated
# normal shape, so the optimal rule is a cut and its accuracy is bounded.
lo, hi, mu, sd = 0.045, 20.0, 18.66, 2.0
a, b = (lo - mu) / sd, (hi - mu) / sd
cuts = np.linspace(15, 23, 8001)
fb = truncnorm.cdf(cuts, a, b, loc=mu, scale=sd)
fr = truncnorm.cdf(cuts - 3.0, a, b, loc=mu, scale=sd)
acc = 0.5 * fb + 0.5 * (1 - fr)
i = int(np.argmax(acc))
print(f"ceiling: accuracy {acc[i]:.4f} at cut {cuts[i]:.2f} ms, tpr {1 - fr[i]:.4f}")

# with an alteration delay the classes separate
late = TimingParams(t_other_a=Jitter(3.0, 0.0), t_alter=5.0)
data = sample_benign(benign_p, 2000, 2) + sample_relayed(late, 2000, 3)
train, test = split(data, 0.3, 1)
m = evaluate_detector(train_detector(train, "forest", 1), test)
print(f"t_alter=5 ms: forest acc {m.accuracy:.3f}  tpr {m.tpr:.3f}")
