# BER and signature success rate across SNR, with and without SECDED.
from cechain.phych import ChannelModel, analytic_sr, ber_sr_sweep, flip_probability

snrs = [0, 3, 6, 9, 12, 15, 18]
for kind in ("awgn", "rayleigh"):
    print(f"\n{kind}")
    print(" snr   p          SR plain  (oracle)   SR coded  (oracle)")
    plain = ber_sr_sweep(snrs, 13, "identity", 5000, rng_seed=1, kind=kind)
    coded = ber_sr_sweep(snrs, 13, "hamming_secded", 5000, rng_seed=1, kind=kind)
    for u, c in zip(plain, coded):
        p = flip_probability(ChannelModel(kind, u.snr_db))
        print(f"{u.snr_db:4.0f}  {p:.3e}  {u.sr:8.4f}  ({analytic_sr(p, 13):.4f})   "
              f"{c.sr:8.4f}  ({analytic_sr(p, 13, 'hamming_secded'):.4f})")

# the sweep is plot-ready CSV
print("\n" + plain.to_csv())
