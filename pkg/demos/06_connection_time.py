# Connection time with the signature chain, and what attacks end up as.
from cechain.harness import ce_run, parse_config

print(" N  slices  T_extract  T_CE     overhead")
for n in (13, 14, 15):
    r = ce_run(parse_config({"n_frames": n}))
    print(f"{n:2d}  {r.slices:6d}  {r.t_extract_ms:9.2f}  {r.t_ce_ms:.2f}  {r.overhead_percent:.2f}%")

print()
for action in ("FakeCsaToSta", "JamAndForceApSwitch", "DualChannelCsaMitm",
               "SpoofElementKeepPreamble", "SpoofPreambleBits", "ReplaySliceChain"):
    r = ce_run(parse_config({"adversary": {"action": action, "t_alter": 5.0}}))
    print(f"{action:26s} {r.outcome:9s} {r.reason}")

noisy = parse_config({"codec": {"kind": "hamming_secded"}, "channel": {"kind": "awgn", "snr_db": 7}})
r = ce_run(noisy)
print("\nSECDED at 7 dB:", r.outcome, r.reason, "corrected slices:", r.codec_statuses.count("corrected"))
