"""Trace ingestion: three on-disk formats, one key stream.

Every parser normalizes to a flat array of 64-bit keys replayed in order.
The same stream can be serialized back to the plain format and re-parsed
bit-exactly, which is also how `kwaycache synth` materializes workloads.
"""
import io

from kwaycache import CacheConfig, parse_arc_blocks, parse_plain, parse_spc, write_plain
from kwaycache.sim import run_hit_ratio

plain = b"""# one key per line; first token wins, strings are hashed
17
42
block-9f
17
"""
ks = parse_plain(io.BytesIO(plain))
print("plain   ->", ks.keys.tolist())

arc = b"""100 3 0 0
5 2 0 0
"""
ks = parse_arc_blocks(io.BytesIO(arc))
print("arc     ->", ks.keys.tolist(), "(start/count lines expand to runs)")

spc = b"""0,42,512,r,0.10
1,42,512,w,0.15
0,43,512,r,0.20
"""
ks = parse_spc(io.BytesIO(spc))
print("spc     ->", [hex(k) for k in ks.keys.tolist()], "(key = asu<<48 ^ lba)")

buf = io.BytesIO()
write_plain(ks, buf, header="round trip demo")
buf.seek(0)
again = parse_plain(buf)
print("round-trip equal:", ks.keys.tolist() == again.keys.tolist())

m = run_hit_ratio(CacheConfig(capacity=2, ways=2), again)
print(f"replayed through a 2-slot cache: {m.hits} hits / {m.requests} requests")
