#!/usr/bin/env python3
"""Writes the golden scenarios (scenarios/) and the evaluation dataset (dataset/)."""
import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

DOMAIN = [
    "# household manipulation domain",
    "type graspable: mug, cup, thermos, apple, banana, bottle, can, vase, box, glass, bowl",
    "type openable: microwave, drawer_handle, cabinet, fridge, bagganas",
    "",
    "predicate free(?e: effector) aka empty",
    "predicate located(?o: any) aka located, seen, there",
    "predicate bind(?o: any, ?e: effector) aka held, holding, grasped",
    "predicate closed(?o: any) aka shut",
    "predicate not_closed(?o: any) aka open",
    "predicate filled(?o: any) aka full",
    "predicate not_filled(?o: any) aka empty",
    "mutex free(?e) | bind(?o, ?e)",
    "",
    "grasp_sct.yml(?o: graspable, ?e: effector) verbs: grasp, pick up; pre: free ?e, located ?o; eff: +bind ?o ?e, -free ?e",
    "release_sct.yml(?o: graspable, ?e: effector) verbs: release, put down; pre: bind ?o ?e; eff: +free ?e, -bind ?o ?e",
    "open_microwave_sct.yml(?o: microwave, ?e: effector) verbs: open; pre: closed ?o, free ?e; eff: +not_closed ?o, -closed ?o",
    "close_microwave_sct.yml(?o: microwave, ?e: effector) verbs: close; pre: not_closed ?o, free ?e; eff: +closed ?o, -not_closed ?o",
    "open_drawer_sct.yml(?o: drawer_handle | cabinet | bagganas, ?e: effector) verbs: open; pre: closed ?o, free ?e; eff: +not_closed ?o, -closed ?o",
    "close_drawer_sct.yml(?o: drawer_handle | cabinet | bagganas, ?e: effector) verbs: close; pre: not_closed ?o, free ?e; eff: +closed ?o, -not_closed ?o",
    "pour_from_sct.yml(?s: thermos | bottle, ?t: mug | cup | glass | bowl, ?e: effector) verbs: pour; pre: bind ?s ?e, filled ?s, located ?t; eff: +filled ?t",
]

FIG4_DOMAIN = [
    "predicate free(?e: effector)",
    "predicate located(?o: any)",
    "predicate bind(?o: any, ?e: effector)",
    "predicate closed(?o: any)",
    "predicate not_closed(?o: any) aka open",
    "mutex free(?e) | bind(?o, ?e)",
    "",
    "grasp_sct.yml(?o: mug, ?e: effector) verbs: grasp, pick up; pre: free ?e, located ?o; eff: +bind ?o ?e, -free ?e",
    "release_sct.yml(?o: mug, ?e: effector) verbs: release; pre: bind ?o ?e; eff: +free ?e, -bind ?o ?e",
    "open_microwave_sct.yml(?o: microwave, ?e: effector) verbs: open; pre: closed ?o, free ?e; eff: +not_closed ?o, -closed ?o",
    "close_microwave_sct.yml(?o: microwave, ?e: effector) verbs: close; pre: not_closed ?o, free ?e; eff: +closed ?o, -not_closed ?o",
]

CLASSES = {
    "mug_green": {"synonyms": ["mug", "cup"]},
    "mug_peach": {"synonyms": ["mug", "cup"]},
    "mug_purple": {"synonyms": ["mug", "cup"]},
    "mug_red": {"synonyms": ["mug", "cup"]},
    "thermos_blue": {"synonyms": ["thermos", "bottle", "flask"]},
    "apple_green": {"synonyms": ["apple"]},
    "apple_red": {"synonyms": ["apple"]},
    "banana_yellow": {"synonyms": ["banana"]},
    "drawer_handle": {"synonyms": ["drawer"]},
    "op_microwave": {"synonyms": ["microwave", "oven"]},
    "bottle_water": {"synonyms": ["bottle"]},
    "glass_clear": {"synonyms": ["glass"]},
    "bowl_white": {"synonyms": ["bowl"]},
    "vase_dark_blue": {"synonyms": ["vase"]},
    "can_red": {"synonyms": ["can", "soda"]},
    "box_cereal": {"synonyms": ["box", "cereal"]},
    "ikea_bagganas": {"synonyms": ["bagganas"], "gloss": ["cabinet", "cupboard"]},
    "ikea_kallax": {"synonyms": ["kallax"], "gloss": ["shelf", "cabinet"]},
    "ikea_vardagen": {"synonyms": ["vardagen"], "gloss": ["pot", "saucepan"]},
}


def odb(names):
    out = []
    for n in names:
        entry = {"name": n}
        entry.update(CLASSES.get(n, {}))
        out.append(entry)
    return out


def sym(cls, i):
    return f"{cls}${i}"


def scenario(name, classes, instances, state, effectors=None, scene=None, domain=None, lexicon=None):
    doc = {
        "name": name,
        "object_database": odb(classes),
        "effectors": effectors or [{"name": "edan_hand", "synonyms": ["gripper", "hand"]}],
        "domain": domain or DOMAIN,
        "world": {
            "instances": [{"class": c, "id": i, "pose": list(p)} for c, i, p in instances],
            "state": sorted(state),
        },
    }
    if instances:
        doc["world"]["next_id"] = max(i for _, i, _ in instances) + 1
    if scene is not None:
        doc["scene"] = scene
    if lexicon:
        doc["lexicon"] = lexicon
    return doc


def scene_obj(cls, i, x, y, radius=0.05, state=None):
    return {"class": cls, "id": i, "position": [x, y], "radius": radius, "state": state or []}


def make_scene(objects, robot=(0.0, 0.0), heading=0.0):
    return {
        "robot": {"position": list(robot), "heading": heading},
        "camera": {"fov": math.pi / 2, "range": 5.0},
        "max_step": 1.5,
        "max_turn": math.pi,
        "objects": objects,
    }


def located(*symbols):
    return [f"located_{s}" for s in symbols]


def golden():
    out = {}
    right_arm = [{"name": "right_arm", "synonyms": ["arm", "gripper"]}]
    kitchen_pair_instances = [("op_microwave", 1, (1.0, 0.5, 0.0)), ("mug_green", 2, (0.8, -0.2, 0.0))]
    base = located("op_microwave$1", "mug_green$2") + ["free_right_arm"]
    out["microwave_closed_busy"] = scenario("microwave_closed_busy", ["mug_green", "op_microwave"], kitchen_pair_instances,
                            base + ["closed_op_microwave$1"], right_arm, domain=FIG4_DOMAIN)
    out["microwave_open_busy"] = scenario("microwave_open_busy", ["mug_green", "op_microwave"], kitchen_pair_instances,
                            base + ["not_closed_op_microwave$1"], right_arm, domain=FIG4_DOMAIN)

    walk_classes = ["drawer_handle", "apple_green", "mug_peach", "thermos_blue"]
    handles = [("drawer_handle", 653, (0.9, 0.4, 0.6)), ("drawer_handle", 654, (0.9, -0.4, 0.6))]
    handle_state = located("drawer_handle$653", "drawer_handle$654") + [
        "closed_drawer_handle$653", "closed_drawer_handle$654"]
    apple = [("apple_green", 659, (0.7, 0.1, 0.8))]
    mug = [("mug_peach", 661, (0.6, -0.1, 0.8))]
    thermos = [("thermos_blue", 664, (0.8, 0.3, 0.8))]
    frames = [
        (handles, handle_state + ["free_edan_hand"]),
        (handles + apple, handle_state + located("apple_green$659") + ["free_edan_hand"]),
        (handles + apple, handle_state + located("apple_green$659") + ["free_edan_hand"]),
        (handles + apple + mug,
         handle_state + located("apple_green$659", "mug_peach$661") + ["free_edan_hand"]),
        (handles + apple + mug + thermos,
         handle_state + located("apple_green$659", "mug_peach$661", "thermos_blue$664")
         + ["bind_mug_peach$661 edan_hand"]),
    ]
    names = ["walk_unknown_object", "walk_unknown_skill", "walk_mug_unseen", "walk_mug_seen", "walk_hand_busy"]
    for name, (inst, state) in zip(names, frames):
        out[name] = scenario(name, walk_classes, inst, state)

    out["occluded_mug"] = scenario(
        "occluded_mug", ["mug_green", "thermos_blue", "apple_red"], [], ["free_edan_hand"],
        scene=make_scene([
            scene_obj("mug_green", 1, 2.0, 0.0),
            scene_obj("toy_octopus", 2, 1.0, 0.0, radius=0.3),
            scene_obj("thermos_blue", 3, 1.5, 1.0, radius=0.06),
        ]))

    out["microwave_closed"] = scenario(
        "microwave_closed", ["mug_peach", "op_microwave"],
        [("op_microwave", 1, (1.0, 0.4, 0.9)), ("mug_peach", 2, (0.9, -0.2, 0.8))],
        located("op_microwave$1", "mug_peach$2") + ["closed_op_microwave$1", "free_edan_hand"])

    out["empty"] = scenario("empty", ["mug_green"], [], [])
    return out


def write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def main():
    for name, doc in golden().items():
        write_json(ROOT / "scenarios" / f"{name}.json", doc)
    write_dataset(ROOT / "dataset")


# Independent geometry for the recovery ground truth.

def seg_point(a, b, p):
    ab = (b[0] - a[0], b[1] - a[1])
    ap = (p[0] - a[0], p[1] - a[1])
    den = ab[0] ** 2 + ab[1] ** 2
    t = 0.0 if den == 0 else max(0.0, min(1.0, (ap[0] * ab[0] + ap[1] * ab[1]) / den))
    q = (a[0] + t * ab[0], a[1] + t * ab[1])
    return math.hypot(p[0] - q[0], p[1] - q[1])


def wrap(a):
    while a > math.pi:
        a -= 2 * math.pi
    while a <= -math.pi:
        a += 2 * math.pi
    return a


def sees(scene, pos, heading, target):
    t = next(o for o in scene["objects"] if o["id"] == target)
    dx, dy = t["position"][0] - pos[0], t["position"][1] - pos[1]
    if math.hypot(dx, dy) > scene["camera"]["range"]:
        return False
    if abs(wrap(math.atan2(dy, dx) - heading)) > scene["camera"]["fov"] / 2 + 1e-12:
        return False
    return all(seg_point(pos, t["position"], o["position"]) >= o["radius"]
               for o in scene["objects"] if o["id"] != target)


def expected_move(scene, target):
    """First working move: stay, turn in place, then N..NW at 0.5 m, then at 1.0 m."""
    x0, y0 = scene["robot"]["position"]
    h0 = scene["robot"]["heading"]
    t = next(o for o in scene["objects"] if o["id"] == target)["position"]
    cands = [(0.0, 0.0, False), (0.0, 0.0, True)]
    for d in (0.5, 1.0):
        for k in range(8):
            b = math.pi / 2 - k * math.pi / 4
            cands.append((d * math.cos(b), d * math.sin(b), True))
    for dx, dy, face in cands:
        pos = (x0 + dx, y0 + dy)
        turn = wrap(math.atan2(t[1] - pos[1], t[0] - pos[0]) - h0) if face else 0.0
        if abs(turn) > scene["max_turn"] + 1e-12:
            continue
        if sees(scene, pos, h0 + turn, target):
            return dx, dy, turn
    return None


COMPASS = ["east", "north-east", "north", "north-west", "west", "south-west", "south", "south-east"]


def move_words(move):
    dx, dy, turn = move
    d = math.hypot(dx, dy)
    if d < 1e-9:
        return f"turn {'left' if turn > 0 else 'right'} by {abs(math.degrees(turn)):.0f} degrees", \
            ["turn " + ("left" if turn > 0 else "right")]
    sector = round(math.atan2(dy, dx) / (math.pi / 4)) % 8
    return f"move {d:.1f} m {COMPASS[sector]}", [f"{d:.1f} m {COMPASS[sector]}"]


def turn(user=None, robot=None):
    return {"user": user} if user is not None else {"robot": robot}


def episode(eid, unit, scen, query, gt, facts, rebuttals=None, image=None):
    doc = {"id": eid, "unit": unit, "scenario": f"scenarios/{scen}.json", "query": query,
           "ground_truth_conversation": gt, "decisive_fact": facts}
    if rebuttals:
        doc["rebuttals"] = rebuttals
    if image:
        doc["image"] = image
    return doc


KITCHEN = ["mug_green", "mug_peach", "mug_purple", "mug_red", "thermos_blue", "apple_green", "apple_red",
           "banana_yellow", "drawer_handle", "op_microwave", "bottle_water", "glass_clear", "bowl_white",
           "vase_dark_blue", "can_red", "box_cereal", "ikea_bagganas"]


def localization(scenarios):
    out = []
    scenarios["loc_table"] = scenario(
        "loc_table", KITCHEN,
        [("mug_red", 1, (0.8, 0.2, 0.8)), ("apple_red", 2, (0.7, -0.2, 0.8)), ("box_cereal", 3, (0.9, 0.4, 0.8))],
        located("mug_red$1", "apple_red$2", "box_cereal$3") + ["free_edan_hand"])
    scenarios["loc_empty_table"] = scenario("loc_empty_table", KITCHEN, [], ["free_edan_hand"])
    rows = [
        ("loc_table", "Why can you not pick up the pineapple?", "unknown", "pineapple"),
        ("loc_table", "Why can you not grasp the purple mug?", "absent", "purple mug"),
        ("loc_empty_table", "Why can't you grab the banana?", "absent", "banana"),
        ("loc_table", "Why can you not pick up the red apple?", "present", "red apple"),
        ("loc_table", "Why can you not pick up the kettle?", "unknown", "kettle"),
        ("loc_empty_table", "Why can you not pick up the soda can?", "absent", "soda can"),
        ("loc_table", "Why can you not pick up the glass?", "absent", "glass"),
        ("loc_empty_table", "Why can you not grasp the blue vase?", "absent", "blue vase"),
        ("loc_table", "Why can you not grasp the green cup?", "absent", "green cup"),
        ("loc_table", "Why can you not pick up the remote control?", "unknown", "remote control"),
        ("loc_table", "Why can you not take the cereal box?", "present", "cereal box"),
        ("loc_table", "Why can you not pick up the yellow mug?", "unknown", "yellow mug"),
        ("loc_empty_table", "How come you cannot lift the peach mug?", "absent", "peach mug"),
    ]
    for k, (scen, q, kind, noun) in enumerate(rows, start=1):
        if kind == "unknown":
            reply, facts = f"I do not know what a {noun} is. It is not in my object database.", [noun, "object database"]
        elif kind == "absent":
            reply, facts = f"The {noun} is not in my world model, I have not seen one yet.", [noun, "world model"]
        else:
            reply, facts = f"The {noun} is in my world model, so I should be able to do that right now.", \
                [noun, "right now"]
        out.append(episode(f"loc_{k:02d}", "object_localization", scen, q,
                           [turn(user=q), turn(robot=reply)], facts))
    return out


def preconditions(scenarios):
    out = []

    def world(name, inst, state):
        scenarios[name] = scenario(name, KITCHEN, inst, state)

    mw = [("op_microwave", 1, (1.0, 0.4, 0.9)), ("mug_peach", 2, (0.9, -0.2, 0.8))]
    mw_seen = located("op_microwave$1", "mug_peach$2")
    world("pre_mw_closed", mw, mw_seen + ["closed_op_microwave$1", "free_edan_hand"])
    world("pre_mw_open", mw, mw_seen + ["not_closed_op_microwave$1", "free_edan_hand"])
    world("pre_mw_busy", mw, mw_seen + ["closed_op_microwave$1", "bind_mug_peach$2 edan_hand"])
    fruit = [("apple_green", 1, (0.6, 0.1, 0.8)), ("banana_yellow", 2, (0.7, 0.3, 0.8))]
    world("pre_fruit_busy", fruit, located("apple_green$1", "banana_yellow$2") + ["bind_banana_yellow$2 edan_hand"])
    pour = [("thermos_blue", 1, (0.7, 0.2, 0.8)), ("mug_green", 2, (0.6, -0.1, 0.8))]
    pour_seen = located("thermos_blue$1", "mug_green$2")
    world("pre_pour_unheld", pour, pour_seen + ["filled_thermos_blue$1", "free_edan_hand"])
    world("pre_pour_empty", pour, pour_seen + ["bind_thermos_blue$1 edan_hand", "not_filled_thermos_blue$1"])
    drawer = [("drawer_handle", 1, (0.9, 0.0, 0.5))]
    world("pre_drawer_open", drawer, located("drawer_handle$1") + ["not_closed_drawer_handle$1", "free_edan_hand"])
    world("pre_drawer_closed", drawer, located("drawer_handle$1") + ["closed_drawer_handle$1", "free_edan_hand"])
    cab = [("ikea_bagganas", 1, (1.2, 0.5, 0.6)), ("mug_red", 2, (0.8, -0.3, 0.8))]
    cab_seen = located("ikea_bagganas$1", "mug_red$2")
    world("pre_cab_open", cab, cab_seen + ["not_closed_ikea_bagganas$1", "free_edan_hand"])
    world("pre_cab_closed", cab, cab_seen + ["closed_ikea_bagganas$1", "free_edan_hand"])
    world("pre_cab_busy", cab, cab_seen + ["closed_ikea_bagganas$1", "bind_mug_red$2 edan_hand"])

    rows = [
        ("pre_mw_closed", "Why can I not close the microwave?", "You need to open the microwave first.",
         ["open microwave"]),
        ("pre_mw_open", "Why can you not open the microwave?", "The microwave is already open, close it first.",
         ["close microwave"]),
        ("pre_mw_busy", "Why can you not open the microwave?",
         "My gripper is not free because I am holding the mug. The gripper needs to be free.", ["gripper free"]),
        ("pre_fruit_busy", "Why can you not pick up the green apple?",
         "I am still holding the banana, my gripper has to be free first.", ["gripper free"]),
        ("pre_pour_unheld", "Why can you not pour from the thermos?",
         "You need to grasp the thermos first.", ["grasp thermos"]),
        ("pre_pour_empty", "Why can you not pour from the thermos?",
         "The thermos is empty. It has to be filled first.", ["thermos filled"]),
        ("pre_drawer_open", "Why can you not open the drawer?", "The drawer is already open; close it first.",
         ["close drawer"]),
        ("pre_drawer_closed", "Why can you not close the drawer?", "You need to open the drawer first.",
         ["open drawer"]),
        ("pre_cab_open", "Why can you not open the cabinet?",
         "The bagganas cabinet is already open, you need to close the bagganas first.", ["close bagganas"]),
        ("pre_cab_closed", "Why can't you close the cupboard?",
         "You need to open the bagganas cupboard first.", ["open bagganas"]),
        ("pre_cab_busy", "Why can you not open the cabinet?",
         "My gripper is not free, I am holding the red mug.", ["gripper free"]),
    ]
    for k, (scen, q, reply, facts) in enumerate(rows, start=1):
        out.append(episode(f"pre_{k:02d}", "unmet_precondition", scen, q,
                           [turn(user=q), turn(robot=reply)], facts))
    return out


def recovery(scenarios):
    out = []
    rows = [
        # scene name, objects, robot heading, target id, query, rebuttal, noun
        ("rec_octopus", [scene_obj("mug_green", 1, 2.0, 0.0), scene_obj("toy_octopus", 2, 1.0, 0.0, 0.3)],
         0.0, 1, "Why can I not grasp the greenish cup?", "There is a green cup there!", "green cup"),
        ("rec_plant", [scene_obj("thermos_blue", 1, 2.5, 0.2, 0.06), scene_obj("plant", 2, 1.2, 0.1, 0.25)],
         0.0, 1, "Why can you not pick up the thermos?", "But the thermos is right there on the table!",
         "thermos"),
        ("rec_box", [scene_obj("apple_red", 1, 1.8, -0.3), scene_obj("moving_box", 2, 1.0, -0.15, 0.2)],
         0.0, 1, "Why can you not pick up the red apple?", "There is a red apple behind the box!", "red apple"),
        ("rec_behind", [scene_obj("banana_yellow", 1, -1.5, 0.2), scene_obj("mug_red", 2, 1.0, 0.0)],
         0.0, 1, "Why can you not grab the banana?", "The banana is behind you!", "banana"),
        ("rec_left", [scene_obj("mug_purple", 1, 0.3, 2.0), scene_obj("apple_green", 2, 1.0, 0.2)],
         0.0, 1, "Why can you not grasp the purple mug?", "There is a purple mug there!", "purple mug"),
        ("rec_missing", [scene_obj("mug_green", 1, 1.2, 0.0), scene_obj("apple_red", 2, 1.0, 0.4)],
         0.0, None, "Why can you not pick up the water bottle?", "There is a water bottle there!", "water bottle"),
        ("rec_chair", [scene_obj("can_red", 1, 3.0, 0.0), scene_obj("chair", 2, 1.5, 0.0, 0.5)],
         0.0, 1, "Why can you not pick up the soda can?", "But there is a soda can right there!", "soda can"),
        ("rec_far", [scene_obj("glass_clear", 1, 5.8, 0.0), scene_obj("mug_green", 2, 1.0, 0.5)],
         0.0, 1, "Why can you not pick up the glass?", "There is a glass there!", "glass"),
        ("rec_cereal", [scene_obj("bowl_white", 1, 2.0, 1.0), scene_obj("box_cereal", 2, 1.2, 0.6, 0.25)],
         0.0, 1, "Why can you not grasp the bowl?", "The bowl is right behind the cereal box!", "bowl"),
        ("rec_ring", [scene_obj("vase_dark_blue", 1, 2.0, 0.0)]
         + [scene_obj("pillar", 10 + k, 2.0 + 0.45 * math.cos(k * math.pi / 4), 0.45 * math.sin(k * math.pi / 4),
                      0.25) for k in range(8)],
         0.0, 1, "Why can you not pick up the blue vase?", "There is a blue vase there!", "blue vase"),
        ("rec_wrong_colour", [scene_obj("apple_red", 1, 1.5, 0.0), scene_obj("mug_red", 2, 1.0, 0.6)],
         0.0, None, "Why can you not pick up the green apple?", "There is a green apple there!", "green apple"),
        ("rec_two", [scene_obj("mug_peach", 1, 2.5, 0.0), scene_obj("toy_octopus", 2, 1.25, 0.0, 0.3),
                     scene_obj("plant", 3, 1.5, 0.8, 0.3)],
         0.0, 1, "Why can you not grasp the peach mug?", "Look, the peach mug is over there!", "peach mug"),
        ("rec_south", [scene_obj("thermos_blue", 1, 0.0, -2.2, 0.06), scene_obj("mug_green", 2, 1.0, 0.0)],
         0.0, 1, "Why can you not pick up the thermos bottle?", "There is a thermos there!", "thermos"),
        ("rec_north_facing", [scene_obj("banana_yellow", 1, 2.0, 0.0), scene_obj("toy_octopus", 2, 1.0, 0.0, 0.3)],
         math.pi / 2, 1, "Why can't you pick up the banana?", "There is a banana there!", "banana"),
        ("rec_far_box", [scene_obj("mug_peach", 1, 4.5, 0.5), scene_obj("moving_box", 2, 2.0, 0.2, 0.4)],
         0.0, 1, "Why can you not pick up the peach cup?", "There is a peach cup on the shelf!", "peach cup"),
        ("rec_hidden_cup", [scene_obj("mug_red", 1, 1.6, -0.6), scene_obj("toy_octopus", 2, 0.8, -0.3, 0.2)],
         0.0, 1, "Why can you not pick up the red cup?", "There is a red cup behind the octopus!", "red cup"),
    ]
    occluder_names = {"toy_octopus": "toy octopus", "moving_box": "moving box", "box_cereal": "box"}
    for k, (name, objects, heading, target, q, rebut, noun) in enumerate(rows, start=1):
        scene = make_scene(objects, heading=heading)
        scenarios[name] = scenario(name, KITCHEN, [], ["free_edan_hand"], scene=scene)
        first = f"The {noun} is not in my world model."
        if target is None:
            second, facts = f"I cannot find the {noun} anywhere around me, it is not in the environment.", \
                [noun, "find"]
        else:
            move = expected_move(scene, target)
            if move is None:
                second, facts = (f"I cannot get a clear view of the {noun}. Please drive my end effector to it.",
                                 ["end effector"])
            else:
                words, facts = move_words(move)
                second = f"The {noun} is out of my sight. If you {words}, I should see it."
        gt = [turn(user=q), turn(robot=first), turn(user=rebut), turn(robot=second)]
        out.append(episode(f"rec_{k:02d}", "recovery_suggestion", name, q, gt, facts, rebuttals=[rebut]))
    return out


def write_dataset(root):
    scenarios = {}
    episodes = localization(scenarios) + preconditions(scenarios) + recovery(scenarios)
    for name, doc in scenarios.items():
        write_json(root / "scenarios" / f"{name}.json", doc)
    for ep in episodes:
        write_json(root / "episodes" / f"{ep['id']}.json", ep)


if __name__ == "__main__":
    main()
