#!/usr/bin/env python3
"""Writes vgame_corpus.jsonl: an upstream supplier squeezing a downstream carmaker.

Titles and company names carry no digits, so every number in the corpus is a
fact the extractor can ground.
"""
import json
import random
import sys

UP = "Apex Materials Group"
DOWN = "Borealis Motors"
OTHERS = ["Halvard Capital", "Nordlake Systems", "Kestrel Industries", "Tidewater Bank"]
MONTHS = ["January", "February", "March", "April", "May", "June", "July", "August",
          "September", "October", "November", "December"]

ECOLOGICAL = [
    "{up} controls most of the cathode precursor capacity that {down} depends on, and its business model rests on a resource monopoly over refined nickel.",
    "Analysts at {other} describe the relationship as a vertical game in which the upstream supplier sets the terms and the downstream buyer absorbs the shock.",
    "The monopoly is based on raw materials rather than intellectual property, which makes the barrier harder to engineer around.",
    "Every supply chain map drawn this year puts {up} at the narrow neck of the funnel, with dozens of assemblers crowded below it.",
    "The strategic contradiction is plain: short-term profit for the supplier against the long-term ecosystem health of the buyers it feeds.",
    "Dealers say the warning signal is whether {up} is sacrificing the viability of its customers for quarterly earnings.",
    "Smaller buyers such as {other} have already begun qualifying second sources, a slow process that rarely finishes inside a year.",
    "The ecosystem around the battery plants has thinned out, with logistics firms and tooling shops following the orders wherever they move.",
    "Industry associations have asked regulators to look at long-term contracts that tie a carmaker to a single upstream vendor.",
    "In private, procurement chiefs call the arrangement a route lock-in rather than a temporary squeeze.",
    "Vertical integration is the obvious escape, yet building a refinery takes capital that most downstream manufacturers do not have.",
    "The pricing power contest is the battlefield, and so far the upstream side holds almost every card.",
]

QUANTITATIVE = [
    "{up} raised the contract price of cathode precursor by {pct}% in {month} {year}.",
    "Raw material price spikes pushed the cost of each battery pack up by {amt} yuan over the quarter.",
    "{down} reported that its gross margin fell to {pct2}% as order delivery delays piled up.",
    "Capacity expansion at {up} added {tonnes} tonnes of annual output, nearly all of it sold under long-term contracts.",
    "{down} shipped {units} units in the period, short of the plan its board approved.",
    "{down} kept client stickiness through a repeat purchase rate of {pct3}% among fleet buyers.",
    "{down} rates its supply chain elasticity as thin, with inventory cover of {days} days of production.",
    "{other} estimates the impact of the price increase at {bn} billion yuan of lost operating profit across the downstream sector.",
    "Spot prices for refined nickel climbed {pct4}% between {month} and {month2}.",
    "{up} booked net profit of {bn2} billion yuan, its best result since listing.",
    "Cash flow fragility shows in the numbers: {down} burned {bn3} billion yuan in operating cash during the half.",
    "Tech dependency is measured in qualification time, which {other} puts at {months} months for a new cathode supplier.",
]

NARRATIVE = [
    "\"We are paying for their quarterly earnings with our own future,\" said Lena Sorvik, head of purchasing at {down}.",
    "On the assembly floor the talk is about overtime that never comes, because the parts that would justify it are stuck upstream.",
    "\"Pricing power is the only thing that matters in this market,\" said Tomas Ek, a portfolio manager at {other}.",
    "A line supervisor described weeks in which half the stations stood idle while trucks waited at the gate for cathode deliveries.",
    "\"Is this a squeeze or a permanent lock-in?\" asked Ines Marr, who covers the sector for {other}.",
    "Executives at {up} say they are simply passing on their own costs, a claim their customers dispute in every meeting.",
    "\"Nobody in this industry can walk away from us,\" said Piet Ander, a sales director at {up}.",
    "At a supplier conference the mood was polite in public and furious in the corridors.",
    "Workers at the {down} plant have started to joke that the battery is the real car and the rest is packaging.",
    "\"We will find another supplier or we will build one,\" said Carl Voss, chief executive of {down}.",
    "Former engineers at {up} say the company learned long ago that the bottleneck is the business.",
    "Customers in the showroom know none of this, only that delivery dates keep moving further out.",
]

STREAMS = [
    ("ecological", ECOLOGICAL, ["Upstream Grip on the Battery Chain", "Who Owns the Funnel", "The Supplier Ecosystem Thins",
                                "Lock-In or Squeeze"]),
    ("quantitative", QUANTITATIVE, ["Cathode Prices and Downstream Margins", "Capacity, Contracts and Cash",
                                    "The Cost of a Battery Pack", "Counting the Downstream Damage"]),
    ("narrative", NARRATIVE, ["Voices from the Assembly Floor", "Inside the Procurement War",
                              "What the Dealers Hear", "The Supplier Meeting"]),
]


def fill(template, rng):
    return template.format(
        up=UP, down=DOWN, other=rng.choice(OTHERS),
        pct=rng.choice([18, 22, 27, 31, 35, 38, 42]),
        pct2=rng.choice([9.4, 11.2, 12.8, 14.1, 15.6]),
        pct3=rng.choice([61, 64, 68, 71, 73]),
        pct4=rng.choice([12, 17, 23, 29, 34]),
        amt=rng.choice([1800, 2400, 3100, 3650, 4200]),
        tonnes=rng.choice([40000, 55000, 62000, 80000]),
        units=rng.choice([128000, 141500, 156200, 173900]),
        days=rng.choice([11, 14, 19, 23]),
        months=rng.choice([9, 12, 15, 18]),
        bn=rng.choice([3.2, 4.7, 5.9, 6.4]),
        bn2=rng.choice([7.1, 8.6, 9.8, 12.3]),
        bn3=rng.choice([1.4, 2.2, 2.9, 3.6]),
        month=rng.choice(MONTHS[:6]), month2=rng.choice(MONTHS[6:]),
        year=rng.choice([2023, 2024]),
    )


def make(seed=7, target_chars=36000):
    rng = random.Random(seed)
    records = []
    per_doc = target_chars // 12
    for stream, templates, titles in STREAMS:
        for k, title in enumerate(titles):
            paragraphs, size = [], 0
            order = templates[:]
            rng.shuffle(order)
            i = 0
            while size < per_doc:
                para = " ".join(fill(order[(i + j) % len(order)], rng) for j in range(3))
                i += 3
                paragraphs.append(para)
                size += len(para) + 2
            records.append({
                "id": f"{stream[:3]}-{k + 1:02d}",
                "stream": stream,
                "title": title,
                "body": "\n\n".join(paragraphs),
                "source_uri": f"file://corpus/{stream}/{k + 1}",
                "retrieved_at": f"2024-11-{k + 10:02d}T08:00:00Z",
            })
    return records


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "vgame_corpus.jsonl"
    with open(out, "w", encoding="utf-8") as f:
        for r in make():
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
