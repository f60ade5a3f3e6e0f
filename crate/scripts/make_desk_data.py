#!/usr/bin/env python3
"""Regenerates the bundled desk dataset under data/desk.

Reviews, queries and per-review topic annotations are written by hand below.
Relevance judgments follow from the topic annotations: a review is relevant to
a query when it is about one of the query's topics. Every relevant review is
judged, as are the lexical decoys (non-relevant reviews sharing a token with
the query) and a few seeded random negatives.

The word vectors are synthetic stand-ins for pretrained 50-d vectors: each
topic has a random centre, topical words sit near the centres of the topics
they belong to, and everything else gets a short random vector.

Usage: python3 scripts/make_desk_data.py [output_dir]
"""

import json
import random
import re
import sys
from pathlib import Path

DIM = 50
SEED = 42

SERVICES = [
    ("s01", "Ah Seng Laksa", ["hawker", "noodles", "laksa"], "North Spine Food Court"),
    ("s02", "Tian Tian Chicken Rice", ["hawker", "chicken rice"], "Canteen 2"),
    ("s03", "Ramen Kiou", ["japanese", "ramen", "noodles"], "South Spine"),
    ("s04", "Sakura Sushi Bar", ["japanese", "sushi", "seafood"], "North Hill"),
    ("s05", "Spice Route", ["indian", "curry"], "Canteen 9"),
    ("s06", "Green Leaf Kitchen", ["vegetarian", "healthy", "salad"], "Hall 6"),
    ("s07", "Seoul Grill", ["korean", "bbq"], "Campus Plaza"),
    ("s08", "Harbour Seafood", ["seafood", "zi char"], "Jurong West"),
    ("s09", "Sweet Spot Desserts", ["dessert", "ice cream", "cake"], "North Spine Food Court"),
    ("s10", "Bean There Cafe", ["coffee", "cafe"], "Library Annex"),
    ("s11", "Mak Cik Nasi Lemak", ["malay", "nasi lemak"], "Canteen 11"),
    ("s12", "Campus Western", ["western", "burgers"], "Canteen 2"),
]

# (service, label, topics, text)
REVIEWS = [
    ("s01", 4, "laksa spicy_soup noodles spicy", "The laksa here is rich and creamy, with fresh cockles and a fiery coconut broth. Best bowl on campus."),
    ("s01", 3, "laksa spicy_soup noodles spicy", "Thick rice noodles in a spicy lemak gravy. The prawns were small but the broth was fragrant."),
    ("s01", 1, "laksa spicy_soup noodles", "The laksa was watery and bland today. Not worth the long queue."),
    ("s01", 4, "spicy_soup noodles spicy", "Their mee soto is a hidden gem, peppery broth and tender shredded chicken. I slurped every drop."),
    ("s01", 2, "laksa noodles", "Average bowl. The gravy is decent but they are stingy with the tau pok."),
    ("s01", 0, "laksa spicy_soup", "Terrible experience. The soup was cold and the auntie was rude when I asked for more chilli."),
    ("s01", 3, "spicy_soup noodles spicy cheap", "Curry mee for four dollars, generous potatoes and a good kick of heat. Great value."),
    ("s01", 4, "laksa spicy_soup noodles spicy", "Prawn laksa with huge prawns and a sambal that burns in the best way. Worth every cent."),
    ("s01", 2, "cheap", "I only had the otah and a drink here. Cheap but nothing special."),
    ("s01", 1, "laksa noodles", "The noodles were soggy and overcooked. The broth lacked depth."),
    ("s01", 3, "spicy_soup noodles spicy", "Tom yum bee hoon is sour, hot and very addictive on a rainy day."),
    ("s01", 4, "laksa spicy_soup spicy", "Creamy, spicy, fragrant. This laksa reminds me of my grandmother's cooking."),
    ("s02", 4, "chicken_rice cheap", "Silky poached chicken on fragrant rice cooked in chicken fat. The chilli sauce is excellent."),
    ("s02", 3, "chicken_rice", "Roasted chicken was juicy and the rice was aromatic. The ginger paste could be stronger."),
    ("s02", 1, "chicken_rice", "The chicken was dry and the rice tasted plain. Disappointing for such a famous stall."),
    ("s02", 4, "chicken_rice cheap", "Hainanese style done right, tender meat, flavourful rice and a clear soup on the side for three fifty."),
    ("s02", 2, "chicken_rice", "Decent plate but the portion of meat was tiny, and it is not a quiet place to eat."),
    ("s02", 0, "", "Found a hair in my food and the uncle did not even apologise. Never again."),
    ("s02", 3, "chicken_rice", "Steamed chicken with soy sauce and sesame oil, simple and comforting."),
    ("s02", 4, "chicken_rice", "The chilli here is garlicky and tangy, it makes the whole plate sing. Tender chicken, perfect rice."),
    ("s02", 2, "", "The char siew rice was too sweet for me. Stick to the steamed bird."),
    ("s02", 1, "chicken_rice", "Long wait, lukewarm chicken and the rice was clumpy."),
    ("s02", 3, "chicken_rice cheap", "Good value lunch, the braised egg add-on is worth it."),
    ("s02", 4, "chicken_rice", "Best hainanese chicken near the hall, the skin is smooth and the meat is moist."),
    ("s03", 4, "japanese ramen noodles", "Rich tonkotsu broth, springy noodles and melt-in-your-mouth chashu."),
    ("s03", 3, "japanese ramen noodles spicy spicy_soup", "The spicy miso ramen has a pleasant heat and a thick broth."),
    ("s03", 1, "japanese ramen noodles", "The ramen broth was far too salty and the egg was overcooked."),
    ("s03", 4, "japanese ramen noodles", "Authentic shoyu ramen with a perfect ajitama. Feels like a Tokyo side street."),
    ("s03", 2, "japanese", "The gyoza were greasy and the portion was small for the price."),
    ("s03", 0, "japanese ramen", "Waited forty minutes for a lukewarm bowl. Staff ignored us."),
    ("s03", 3, "japanese noodles", "Cold soba with dipping sauce is refreshing in this heat."),
    ("s03", 4, "japanese ramen spicy_soup spicy noodles", "Black garlic tonkotsu with a chilli bomb, deeply savoury and fiery."),
    ("s03", 2, "japanese", "Karaage was crispy but the rice bowl was forgettable."),
    ("s03", 3, "japanese ramen noodles", "Quiet in the afternoons, I read while slurping a bowl of shio ramen."),
    ("s03", 1, "japanese noodles", "Overpriced for campus. The udon was bland."),
    ("s03", 4, "japanese ramen", "The chashu is torched before serving, smoky and tender. Great tonkotsu."),
    ("s04", 4, "japanese sushi seafood", "The salmon sashimi was fresh and buttery, and the sushi rice was well seasoned."),
    ("s04", 3, "japanese sushi seafood", "Decent maki rolls and a generous chirashi bowl with plenty of raw fish."),
    ("s04", 1, "japanese sushi seafood", "The tuna tasted fishy and the rice fell apart."),
    ("s04", 4, "japanese sushi seafood", "Omakase set was excellent value, the uni and scallop were sweet and fresh."),
    ("s04", 2, "japanese sushi", "Conveyor belt plates were mostly dry by the time they reached us."),
    ("s04", 0, "japanese sushi", "Food poisoning after the sashimi platter. Avoid."),
    ("s04", 3, "japanese sushi", "Tamago and inari sushi are a nice option for kids."),
    ("s04", 4, "japanese seafood", "Grilled unagi on rice was sweet, smoky and tender."),
    ("s04", 2, "japanese sushi", "The sushi is fine but the green tea is weak and service is slow."),
    ("s04", 3, "japanese sushi seafood", "Fresh ikura and crisp nori, the hand rolls are good."),
    ("s04", 4, "japanese sushi vegetarian", "They have a vegetarian sushi set with avocado, cucumber and pickled radish that is surprisingly tasty."),
    ("s04", 1, "japanese", "Miso soup was lukewarm and the tempura was soggy."),
    ("s05", 4, "indian spicy", "Butter chicken is creamy and the garlic naan comes out blistered from the tandoor."),
    ("s05", 3, "indian vegetarian", "Palak paneer and dal makhani, both rich and comforting. Great for vegetarians."),
    ("s05", 1, "indian", "The biryani was dry and the raita was sour."),
    ("s05", 4, "indian spicy grill", "Tandoori chicken charred outside and juicy inside, with a tangy mint chutney."),
    ("s05", 2, "indian vegetarian", "The masala dosa was crisp but the sambar was too thin."),
    ("s05", 0, "indian", "Waited an hour and the mutton curry arrived cold."),
    ("s05", 3, "indian vegetarian cheap", "Vegetarian thali with three curries, rice and chapati for six dollars."),
    ("s05", 4, "indian spicy", "The fish head curry is tangy, spicy and packed with okra. Share it with friends."),
    ("s05", 2, "indian", "Roti prata was oily and the curry dip was lukewarm."),
    ("s05", 3, "indian spicy", "Chicken tikka masala with a good balance of spice and cream."),
    ("s05", 4, "indian vegetarian", "Chana masala and aloo gobi full of warm spices, and not a bit of meat in sight."),
    ("s05", 1, "indian", "Lassi was watered down and the samosas were stale."),
    ("s06", 4, "vegetarian western", "Plant based burger with a smoky beet patty. I did not miss the beef at all."),
    ("s06", 3, "vegetarian", "Tofu and broccoli stir fry, light and healthy."),
    ("s06", 1, "vegetarian", "The salad was wilted and the dressing was far too sour."),
    ("s06", 4, "vegetarian laksa spicy_soup noodles", "Vegan laksa with tofu puffs and a creamy coconut broth."),
    ("s06", 2, "vegetarian", "Grain bowl was healthy but bland, needs more seasoning."),
    ("s06", 0, "vegetarian", "Tiny portion, high price and the quinoa was undercooked."),
    ("s06", 3, "vegetarian cheap noodles", "Mock meat bee hoon at a fair price, the mushrooms are tasty."),
    ("s06", 4, "vegetarian", "Fresh greens, roasted pumpkin and a zesty lemon dressing. Perfect light lunch."),
    ("s06", 2, "vegetarian", "The lentil soup was fine but the bread was stale."),
    ("s06", 3, "vegetarian study", "Calm corner tables and free wifi, I often bring my laptop and a smoothie bowl here."),
    ("s06", 4, "vegetarian", "Eggplant moussaka without any meat, creamy and satisfying."),
    ("s06", 1, "vegetarian", "The tempeh was rubbery and the staff seemed annoyed."),
    ("s07", 4, "korean grill", "Marinated pork belly sizzling on the charcoal grill, with endless banchan."),
    ("s07", 3, "korean grill", "Beef bulgogi was sweet and tender, though the smoke got into our clothes."),
    ("s07", 1, "korean grill", "The short ribs were tough and mostly fat."),
    ("s07", 4, "korean grill spicy", "Spicy gochujang chicken grilled at the table, crispy edges and sticky glaze."),
    ("s07", 2, "korean", "Kimchi stew was sour and not very hot."),
    ("s07", 0, "korean grill", "The exhaust did not work and the meat burnt in minutes."),
    ("s07", 3, "korean spicy", "Tteokbokki with cheese, chewy and spicy."),
    ("s07", 4, "korean grill", "Wagyu galbi with a perfect char, worth the splurge for birthdays."),
    ("s07", 2, "korean", "The bibimbap was fine but the egg was overcooked."),
    ("s07", 3, "korean seafood cheap", "Lunch set with grilled mackerel and rice is good value."),
    ("s07", 4, "korean spicy spicy_soup noodles", "Army stew packed with ramyeon, spam and sausages, spicy and hearty."),
    ("s07", 1, "korean", "Fried chicken was soggy under the sauce."),
    ("s08", 4, "seafood spicy", "Chilli crab with a sweet and spicy gravy, mop it up with fried mantou."),
    ("s08", 3, "seafood", "Cereal prawns were crunchy and buttery."),
    ("s08", 1, "seafood", "The steamed fish was not fresh and smelled off."),
    ("s08", 4, "seafood", "Live lobster and clams, everything tasted of the sea."),
    ("s08", 2, "seafood", "Salted egg squid was too oily for me."),
    ("s08", 0, "seafood", "Overcharged for the crab and the waiter argued with us."),
    ("s08", 3, "seafood", "Sambal kangkong and oyster omelette, good sharing dishes."),
    ("s08", 4, "seafood", "Black pepper crab, fresh and meaty, best I have had on this side of the island."),
    ("s08", 2, "", "The fried rice was plain and the beer was warm."),
    ("s08", 3, "seafood spicy", "Grilled stingray with sambal, charred and smoky."),
    ("s08", 4, "seafood", "Scallops, mussels and prawns in a garlic butter sauce, incredibly fresh."),
    ("s08", 1, "seafood noodles", "Prawn noodles had mushy prawns and a bland broth."),
    ("s09", 4, "dessert", "Durian pengat is heavenly, creamy and not too sweet."),
    ("s09", 3, "dessert", "The matcha ice cream is smooth, though the waffle was a little limp."),
    ("s09", 1, "dessert", "Chocolate cake was dry and the frosting was sickly sweet."),
    ("s09", 4, "dessert", "Mango sticky rice with warm coconut cream, a perfect ending to dinner."),
    ("s09", 2, "dessert", "The tiramisu was decent but the coffee was bitter."),
    ("s09", 0, "dessert", "Melted ice cream served in a dirty cup."),
    ("s09", 3, "dessert cheap", "Ice kachang for two dollars, huge mound of shaved ice and red beans."),
    ("s09", 4, "dessert", "Lava cake oozes with dark chocolate, pair it with vanilla gelato."),
    ("s09", 2, "dessert", "Pandan chiffon was airy but tasted artificial."),
    ("s09", 3, "dessert study", "A quiet spot in the evenings for revision, with a slice of cheesecake."),
    ("s09", 4, "dessert", "The brownie sundae is rich, fudgy and huge."),
    ("s09", 1, "dessert", "Bubble tea pearls were hard and the drink was too sweet."),
    ("s10", 4, "coffee breakfast", "Velvety flat white and a buttery croissant, my favourite way to start the day."),
    ("s10", 3, "coffee study", "Strong espresso and fast wifi. Good place to finish assignments."),
    ("s10", 1, "coffee", "The latte was lukewarm and the milk was burnt."),
    ("s10", 4, "coffee breakfast", "Single origin pour over with fruity notes and a perfect eggs benedict."),
    ("s10", 2, "coffee", "The cappuccino was fine but the cafe is noisy at lunch."),
    ("s10", 0, "coffee", "Rude barista and a sour, watery americano."),
    ("s10", 3, "study", "Plenty of power sockets and quiet corners for studying, the tea is decent."),
    ("s10", 4, "coffee", "Their cold brew is smooth and chocolatey, perfect for exam season."),
    ("s10", 2, "breakfast", "The pancakes were dense and the syrup was artificial."),
    ("s10", 3, "coffee breakfast", "Kaya toast and a strong kopi in the morning, simple and satisfying."),
    ("s10", 4, "study coffee", "Silent study room upstairs, I spent the whole afternoon revising with a mocha."),
    ("s10", 1, "coffee", "Overpriced coffee and slow service."),
    ("s11", 4, "malay breakfast spicy", "Fragrant coconut rice, crispy ikan bilis and a sambal with real fire."),
    ("s11", 3, "malay breakfast", "Nasi lemak with fried chicken wing and egg, a solid breakfast."),
    ("s11", 1, "malay", "The rendang was tough and the rice was cold."),
    ("s11", 4, "malay grill", "Chicken satay grilled over charcoal with a chunky peanut sauce."),
    ("s11", 2, "malay noodles", "Mee rebus gravy was too sweet."),
    ("s11", 0, "malay", "The sambal was stale and the uncle gave me the wrong order twice."),
    ("s11", 3, "malay cheap breakfast", "Two dollar nasi lemak packet, cheap and filling before lectures."),
    ("s11", 4, "malay spicy", "Ayam penyet with smashed chicken and a fiery sambal."),
    ("s11", 2, "malay", "The lontong was watery and the vegetables were mushy."),
    ("s11", 3, "malay seafood spicy", "Sambal sotong is spicy and tender."),
    ("s11", 4, "malay spicy_soup spicy noodles breakfast", "Mee soto with a peppery broth and begedil, warming on a cold morning."),
    ("s11", 1, "malay breakfast", "The roti john was soggy and the egg was undercooked."),
    ("s12", 4, "western grill", "Juicy beef burger with a smoky char and crispy fries."),
    ("s12", 3, "western grill", "Chicken chop was grilled well and the black pepper sauce was tasty."),
    ("s12", 1, "western", "Fish and chips were greasy and the batter was soggy."),
    ("s12", 4, "western grill", "Ribeye steak cooked medium rare, tender and well seasoned."),
    ("s12", 2, "western", "Carbonara was too creamy and bland."),
    ("s12", 0, "western", "The burger patty was raw in the middle."),
    ("s12", 3, "western cheap", "Student set meal with soup and bread at a fair price."),
    ("s12", 4, "western grill", "Pork ribs glazed with barbecue sauce, falling off the bone."),
    ("s12", 2, "western", "The fries were cold and the coleslaw was sour."),
    ("s12", 3, "western breakfast", "Big breakfast with sausages, hash browns and eggs."),
    ("s12", 4, "western grill", "Grilled lamb chops with mint sauce, charred and juicy."),
    ("s12", 1, "western", "The spaghetti bolognese tasted like canned sauce."),
]

# Dish-level review categories added on top of the service's categories.
TOPIC_CATEGORIES = {
    "vegetarian": "vegetarian",
    "spicy": "spicy",
    "breakfast": "breakfast",
    "grill": "grill",
    "seafood": "seafood",
}

TEST_QUERIES = [
    ("t01", "spicy noodle soup", "spicy_soup"),
    ("t02", "chicken rice", "chicken_rice"),
    ("t03", "japanese food", "japanese"),
    ("t04", "meatless meals", "vegetarian"),
    ("t05", "grilled meat", "grill"),
    ("t06", "fresh seafood", "seafood"),
    ("t07", "sweet treats", "dessert"),
    ("t08", "morning coffee", "coffee"),
    ("t09", "indian curry", "indian"),
    ("t10", "quiet place to study", "study"),
]

TRAIN_QUERIES = [
    ("q01", "laksa with prawns", "laksa"),
    ("q02", "hainanese chicken", "chicken_rice"),
    ("q03", "ramen broth", "ramen"),
    ("q04", "sushi and sashimi", "sushi"),
    ("q05", "vegan dishes", "vegetarian"),
    ("q06", "korean barbecue", "korean"),
    ("q07", "crab and prawns", "seafood"),
    ("q08", "ice cream", "dessert"),
    ("q09", "cappuccino and latte", "coffee"),
    ("q10", "butter chicken and naan", "indian"),
    ("q11", "breakfast", "breakfast"),
    ("q12", "burgers and fries", "western"),
    ("q13", "cheap lunch", "cheap"),
    ("q14", "spicy food", "spicy"),
    ("q15", "healthy salad", "vegetarian"),
    ("q16", "cake and pastries", "dessert"),
    ("q17", "noodles", "noodles"),
    ("q18", "malay food", "malay"),
    ("q19", "study spot with wifi", "study"),
    ("q20", "bbq pork", "grill"),
]

CLUSTERS = {
    "spicy_soup": "laksa noodle noodles soup broth mee soto bee hoon tom yum gravy lemak slurped slurping bowl stew ramyeon rebus",
    "noodles": "noodle noodles mee hoon bee ramen udon soba laksa ramyeon spaghetti carbonara",
    "spicy": "spicy fiery chilli sambal heat hot burns kick gochujang peppery fire pepper spice spices",
    "chicken_rice": "chicken rice hainanese poached steamed ginger soy bird roasted sesame fat skin",
    "japanese": "japanese ramen tonkotsu chashu miso shoyu ajitama gyoza soba karaage udon sushi sashimi maki chirashi omakase uni tamago inari unagi ikura nori tempura tokyo shio matcha",
    "seafood": "seafood fish crab prawn prawns lobster clams squid scallop scallops mussels oyster sotong stingray mackerel tuna salmon cockles sea fishy ikura uni unagi",
    "vegetarian": "vegetarian vegetarians vegan meatless tofu paneer dal plant beet salad greens lentil quinoa tempeh mushrooms eggplant chana aloo gobi vegetables broccoli mock healthy avocado cucumber pumpkin palak moussaka",
    "grill": "grilled grill charcoal char charred smoky bbq barbecue satay tandoori tandoor steak ribs ribeye galbi bulgogi belly pork beef lamb chops burger meat meats wagyu sizzling torched patty",
    "korean": "korean kimchi bulgogi galbi banchan tteokbokki bibimbap gochujang ramyeon seoul",
    "dessert": "dessert desserts sweet treats cake cheesecake ice cream gelato sundae brownie chocolate waffle tiramisu chiffon pandan pengat durian mango sticky kachang lava frosting pastries fudgy vanilla pearls",
    "coffee": "coffee latte cappuccino espresso americano mocha flat white brew barista kopi pour origin cafe",
    "breakfast": "breakfast morning croissant eggs toast kaya pancakes benedict hash browns sausages nasi lemak",
    "indian": "indian curry curries naan tandoor tandoori masala tikka paneer dal makhani biryani raita dosa sambar thali chapati prata roti lassi samosas chana chutney aloo gobi",
    "study": "study studying quiet wifi laptop revision revising sockets assignments calm silent read exam corners place spot",
    "western": "western burger burgers fries steak chop carbonara spaghetti bolognese chips coleslaw ribeye",
    "malay": "malay nasi lemak rendang sambal satay ikan bilis rebus lontong penyet ayam begedil sotong",
    "cheap": "cheap dollar dollars value price fair budget affordable cent lunch",
}

STOPWORDS = set(
    "a an the and or but of in on at to for with from by is are was were be been it its this that "
    "these those i me my we our us you your they their them he she his her not no very too so "
    "here there what when while as than then just only also all any more most some such much "
    "had has have do did does done s t".split()
)


def tokenize(text):
    return [t for t in re.split(r"[^0-9a-z]+", text.lower()) if t]


def unit(v):
    n = sum(x * x for x in v) ** 0.5
    return [x / n for x in v]


def gauss(rng, scale):
    return [rng.gauss(0.0, scale) for _ in range(DIM)]


def word_vectors(vocab, rng):
    centres = {name: unit(gauss(rng, 1.0)) for name in sorted(CLUSTERS)}
    membership = {}
    for name in sorted(CLUSTERS):
        for w in CLUSTERS[name].split():
            membership.setdefault(w, []).append(name)
    vectors = {}
    for w in sorted(vocab):
        if w in membership:
            base = [sum(centres[c][i] for c in membership[w]) for i in range(DIM)]
            base = unit(base)
            noise = gauss(rng, 0.35 / DIM**0.5)
            vectors[w] = [b + n for b, n in zip(base, noise)]
        elif w in STOPWORDS:
            vectors[w] = gauss(rng, 0.05 / DIM**0.5)
        else:
            vectors[w] = gauss(rng, 0.3 / DIM**0.5)
    return vectors


def judgments(queries, reviews, rng):
    rows = []
    for qid, text, topic in queries:
        qtokens = set(tokenize(text))
        relevant = [r["id"] for r in reviews if topic in r["_topics"]]
        decoys = [
            r["id"]
            for r in reviews
            if topic not in r["_topics"] and qtokens & set(tokenize(r["text"]))
        ]
        judged = set(relevant) | set(decoys)
        rest = [r["id"] for r in reviews if r["id"] not in judged]
        negatives = sorted(set(decoys) | set(rng.sample(rest, 5)))
        for doc in relevant:
            rows.append((qid, doc, 1))
        for doc in negatives:
            rows.append((qid, doc, 0))
    return rows


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "desk"
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    services = {sid: cats for sid, _, cats, _ in SERVICES}

    reviews = []
    per_service = {}
    for service, label, topics, text in REVIEWS:
        n = per_service.get(service, 0)
        per_service[service] = n + 1
        topic_set = set(topics.split())
        cats = list(services[service]) + [c for t, c in TOPIC_CATEGORIES.items() if t in topic_set]
        cats = list(dict.fromkeys(cats))
        reviews.append({
            "id": f"r{len(reviews) + 1:03d}",
            "service_id": service,
            "text": text,
            "label": label,
            "categories": cats,
            "timestamp": 1_696_118_400 + int(service[1:]) * 3_600 + n * 86_400 * 7,
            "_topics": topic_set,
        })

    with open(out / "services.jsonl", "w") as f:
        for sid, name, cats, location in SERVICES:
            f.write(json.dumps({"id": sid, "name": name, "categories": cats, "location": location}) + "\n")
    with open(out / "reviews.jsonl", "w") as f:
        for r in reviews:
            f.write(json.dumps({k: v for k, v in r.items() if not k.startswith("_")}) + "\n")
    for name, queries in (("test", TEST_QUERIES), ("train", TRAIN_QUERIES)):
        with open(out / f"queries_{name}.tsv", "w") as f:
            for qid, text, _ in queries:
                f.write(f"{qid}\t{text}\n")
        with open(out / f"judgments_{name}.tsv", "w") as f:
            for qid, doc, label in judgments(queries, reviews, rng):
                f.write(f"{qid}\t{doc}\t{label}\n")

    vocab = set()
    for r in reviews:
        vocab.update(tokenize(r["text"]))
        vocab.update(t for c in r["categories"] for t in tokenize(c))
    for _, text, _ in TEST_QUERIES + TRAIN_QUERIES:
        vocab.update(tokenize(text))
    vectors = word_vectors(vocab, rng)
    with open(out / "vectors.txt", "w") as f:
        for w in sorted(vectors):
            f.write(w + " " + " ".join(f"{x:.6f}" for x in vectors[w]) + "\n")


if __name__ == "__main__":
    main()
