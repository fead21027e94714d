#!/usr/bin/env python3
"""Write the bundled synthetic six-language corpus as TSV datasets.

Produces train/test splits for the encyclopedic genre plus an
out-of-domain conversational test set, all derived from the seeds, so
reruns are byte-identical.
"""

import argparse
from pathlib import Path

from nordlid.corpus import save_dataset_tsv, stratified_sample, train_test_split
from nordlid.synth import generate_pools


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data")
    parser.add_argument("--per-class", type=int, default=1000)
    parser.add_argument("--out-domain-per-class", type=int, default=200)
    parser.add_argument("--ratio", type=float, default=0.8)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    pools = generate_pools(args.per_class, genre="wiki", seed=args.seed)
    dataset = stratified_sample(pools, args.per_class, args.seed)
    train, test = train_test_split(dataset, args.ratio, args.seed)
    save_dataset_tsv(dataset, out / "wiki-all.tsv")
    save_dataset_tsv(train, out / "wiki-train.tsv")
    save_dataset_tsv(test, out / "wiki-test.tsv")

    chat_pools = generate_pools(
        args.out_domain_per_class, genre="chat", seed=args.seed + 1
    )
    chat = stratified_sample(chat_pools, args.out_domain_per_class, args.seed + 1)
    save_dataset_tsv(chat, out / "chat-test.tsv")

    for name in ("wiki-all", "wiki-train", "wiki-test", "chat-test"):
        lines = (out / f"{name}.tsv").read_text(encoding="utf-8").count("\n")
        print(f"{name}.tsv\t{lines} sentences")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
