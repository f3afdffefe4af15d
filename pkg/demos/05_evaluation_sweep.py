#!/usr/bin/env python3
"""Synthesize a labeled dataset and sweep decoding configurations.

Reproduces the layout of the reference results table on the toy model:
deterministic rows are flat across runs and seeds, sampling rows beat
them, and retry budgets help sampling further.  Runs in under a minute.
"""

from toycorpus import make_pairs, train_demo_model

from wlac import ContextCase, DecodeConfig, RngState, SweepSpec, run_sweep, synthesize_instances

vocab, model = train_demo_model()

references = make_pairs(300, seed=11)
rng = RngState.derive(2026, "demo-sweep")
instances = synthesize_instances(
    references, {case: 50 for case in ContextCase}, min_typed=1, rng=rng,
    src_lang="toy", tgt_lang="en")
print(f"synthesized {len(instances)} instances; first three:")
for instance in instances[:3]:
    print(f"  typed {instance.typed!r} for gold {instance.gold!r} "
          f"(left={instance.left_context!r}, right={instance.right_context!r})")


def cell(beam=1, topk=0, hyp=10, runs=1):
    return DecodeConfig(beam_size=beam, sampling_topk=topk, num_hypotheses=hyp,
                        max_runs=runs, max_decode_len=16)


spec = SweepSpec(cells=(
    cell(beam=1), cell(beam=5), cell(beam=10),
    cell(topk=10), cell(topk=20), cell(topk=20, hyp=20), cell(topk=50),
    cell(beam=5, runs=5), cell(topk=10, runs=5), cell(topk=20, hyp=20, runs=5),
), seeds=(0, 1, 2))

rows, table = run_sweep(model, spec, instances)
print("\n" + table)
