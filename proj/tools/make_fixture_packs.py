#!/usr/bin/env python3
"""Regenerates the scripted fixture packs under fixtures/sessions/.

Each pack is {"fixtures": [{"match"?, "response"}...]}. Tagged fixtures
answer the agent whose request carries the tag; untagged ones answer the
simulator in order.
"""
import json
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
COMMENTATORS = ["critic-1", "critic-2", "supporter-1", "supporter-2", "neutral-1"]


def fenced(obj):
    return "```json\n" + json.dumps(obj, indent=2, ensure_ascii=False) + "\n```"


def tagged(tag, obj):
    return {"match": tag, "response": fenced(obj)}


def blocks_of(path):
    with open(path, encoding="utf-8") as f:
        text = f.read().strip("\n")
    out = {}
    for block in text.split("\n\n"):
        head = block.splitlines()[0]
        name = "Role" if head.startswith("# Role:") else head[3:].split(":")[0].strip()
        out[name] = block
    return out


def comment(score, issues=()):
    return {"score": score, "issues": [{"module": m, "text": t} for m, t in issues]}


def panel(rounds):
    """rounds: {round: [comment per commentator]}"""
    fx = []
    for i, cid in enumerate(COMMENTATORS):
        for rnd in (1, 2):
            fx.append(tagged("[minstrel:commentator:%s:round=%d]" % (cid, rnd), rounds[rnd][i]))
    return fx


def title_pack():
    blocks = blocks_of(os.path.join(ROOT, "corpus/valid/magazine-editor.lgpt.md"))
    fx = [tagged("[minstrel:analyzer]", {
        "activated": ["Profile", "Goals", "Constraints", "Workflow", "Style"],
        "rationale": {
            "Profile": "The output language should be stated.",
            "Goals": "The task is to produce one title.",
            "Constraints": "Titles need a length limit.",
            "Workflow": "Reading the article comes before naming it.",
            "Style": "Magazine titles follow a house register.",
        },
    })]
    for name in ["Role", "Profile", "Goals", "Constraints", "Style", "Workflow"]:
        fx.append(tagged("[minstrel:designer:%s:design]" % name, {"module": name, "block": blocks[name]}))

    articles = [
        "Please title this article: the city council voted to close three downtown streets to cars.",
        "Next one: a local bakery has used the same sourdough starter for ninety years.",
        "Last article: researchers mapped every tree in the national park using drones.",
    ]
    titles = [
        ["Title: Council Votes to Close Three Downtown Streets to Cars, Opening the Centre to Pedestrians and Cyclists Alike",
         "Title: Ninety Years of One Sourdough Starter",
         "Title: Drones Map Every Tree in the National Park"],
        ["Title: Downtown Streets Go Car-Free",
         "Title: Ninety Years of One Sourdough Starter",
         "Title: Drones Map Every Tree in the National Park"],
    ]
    critique = [
        comment(4, [("Constraints", "The first title runs long; the length limit should be tighter.")]),
        comment(5, [(None, "Titles are accurate but the first is wordy.")]),
        comment(8),
        comment(7),
        comment(6, [("Constraints", "Length varies a lot between titles.")]),
    ]
    approval = [comment(7), comment(7), comment(9), comment(8), comment(8)]
    for p in range(2):
        for turn in range(3):
            fx.append({"match": "[minstrel:questioner:turn=%d]" % (turn + 1), "response": articles[turn]})
            fx.append({"response": titles[p][turn]})
        fx += panel({1: critique if p == 0 else approval, 2: critique if p == 0 else approval})
        if p == 0:
            fx.append(tagged("[minstrel:reflector]", {
                "directives": {"Constraints": "Cap titles at 12 words and keep them to a single clause."}}))
            fx.append(tagged("[minstrel:designer:Constraints:revise]", {
                "module": "Constraints",
                "block": "## Constraints\n- The length of the title should not exceed 12 words.\n"
                         "- Keep the title to a single clause."}))
        else:
            fx.append(tagged("[minstrel:reflector]", {"directives": {}}))
    return {"fixtures": fx}


def title_interactive_pack():
    """Title session where the first reflection follows the user's Style comment."""
    pack = title_pack()
    fx = pack["fixtures"]
    for i, f in enumerate(fx):
        if f.get("match") == "[minstrel:reflector]":
            fx[i] = tagged("[minstrel:reflector]", {
                "directives": {"Style": "Make the register formal and serious; avoid casual phrasing."}})
            break
    for i, f in enumerate(fx):
        if f.get("match") == "[minstrel:designer:Constraints:revise]":
            fx[i] = tagged("[minstrel:designer:Style:revise]", {
                "module": "Style",
                "block": "## Style\n- The style of the title should be formal and serious."})
    return pack


def flatterer_pack():
    replies = {
        "instruction-only": ["That's nice. Cooking dinner is a good skill.",
                             "Running is healthy. Well done."],
        "crispe": ["Cooking dinner for friends shows you are generous.",
                   "A morning run shows real discipline."],
        "langgpt": ["Hello! What a wonderful thing to share. Cooking dinner for friends reveals your generosity, "
                    "your creativity with flavours and your gift for bringing people together.",
                    "A sunrise run! That speaks to your discipline, your optimism and the energy you bring to "
                    "everything you do."],
    }
    scores = {"instruction-only": [3, 4, 5, 5, 4], "crispe": [5, 6, 7, 7, 6], "langgpt": [8, 8, 9, 10, 9]}
    fx = []
    for label in ["instruction-only", "crispe", "langgpt"]:
        fx += [{"response": r} for r in replies[label]]
        s = [comment(v) for v in scores[label]]
        fx += panel({1: s, 2: s})
    return {"fixtures": fx}


def write(name, pack):
    d = os.path.join(ROOT, "fixtures/sessions", name)
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "pack.json"), "w", encoding="utf-8") as f:
        json.dump(pack, f, indent=2, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    write("title", title_pack())
    write("title-interactive", title_interactive_pack())
    write("flatterer", flatterer_pack())
    link = os.path.join(ROOT, "fixtures/title")
    if not os.path.lexists(link):
        os.symlink("sessions/title", link)
    sys.exit(0)
