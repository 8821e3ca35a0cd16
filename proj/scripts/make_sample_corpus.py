#!/usr/bin/env python3
"""Generate the bundled sample corpus.

Positives are getting-to-know-you questions aimed at the assistant.
Negatives are ordinary assistant requests. Output is deterministic.

usage: make_sample_corpus.py OUT_DIR [--seed N]
"""
import argparse
import itertools
import json
import pathlib
import random

FAVORITES = [
    "color", "food", "movie", "book", "song", "season", "animal", "holiday", "sport", "band",
    "city", "ice cream flavor", "dessert", "tv show", "board game", "quote", "word", "place to travel",
    "childhood memory", "breakfast", "singer", "actor", "painting", "poem", "flower", "smell",
    "day of the week", "number", "joke", "cartoon", "video game", "pizza topping", "fruit",
]
LIKES = [
    "dance", "sing", "cook", "read", "swim", "travel", "go to the beach", "watch horror movies",
    "play chess", "go hiking", "sleep in", "eat spicy food", "drink coffee", "listen to jazz",
    "go camping", "paint", "write poetry", "go to parties", "play sports", "spend time alone",
    "ride roller coasters", "watch the sunset", "go shopping", "play the guitar",
]
HAVE = [
    "any pets", "any siblings", "a best friend", "a boyfriend", "a girlfriend", "a favorite teacher",
    "any hobbies", "a crush on anyone", "any regrets", "a secret talent", "any fears", "a nickname",
    "a lucky charm", "any tattoos", "a bucket list", "any children", "a dream job", "a hidden talent",
]
EVER = [
    "been in love", "traveled abroad", "been to paris", "broken a bone", "told a lie",
    "cried at a movie", "had your heart broken", "been on a blind date", "gotten lost",
    "met someone famous", "won a contest", "been stung by a bee", "stayed up all night",
    "felt lonely", "learned to ride a bike", "kissed someone", "been to a concert", "had a pet",
    "been jealous", "dreamed about flying",
]
FEEL = ["happy", "sad", "laugh", "angry", "nervous", "smile", "cry", "excited", "jealous", "proud"]
FREE = ["weekends", "evenings", "holidays", "free time", "summers", "birthdays", "mornings", "days off"]
ARE = [
    "happy", "single", "married", "afraid of the dark", "a morning person", "a cat person",
    "a dog person", "shy", "romantic", "jealous", "lonely", "in love", "an introvert",
    "good at keeping secrets", "ticklish", "superstitious", "a good cook", "religious",
]
ROLE = ["best friend", "hero", "role model", "celebrity crush", "favorite person", "worst enemy", "mentor"]
IF_COULD = [
    ("live anywhere", "where would you live"), ("have any superpower", "which would you choose"),
    ("meet anyone", "who would it be"), ("travel in time", "where would you go"),
    ("be any animal", "what would you be"), ("change one thing about yourself", "what would it be"),
    ("have dinner with anyone", "who would you pick"), ("learn any skill", "what would you learn"),
    ("be famous", "what would you be famous for"), ("switch lives with someone", "who would it be"),
]
OPEN = [
    "what do you do for fun", "where did you grow up", "what are you most afraid of",
    "what is your biggest dream", "what do you like most about yourself", "how old are you",
    "what was your first job", "what are you passionate about", "who do you love the most",
    "what is the best advice you have ever received", "what is the nicest thing anyone has done for you",
    "what is your idea of a perfect date", "what makes a good friend", "do you believe in love at first sight",
    "what do you think about when you are alone", "what is the craziest thing you have ever done",
    "what would your friends say about you", "what are you grateful for", "what keeps you up at night",
    "what was your childhood like", "what is something you are proud of", "what do you want to be when you grow up",
    "do you get along with your family", "what is your love language", "how would you describe yourself",
    "what is your guilty pleasure", "what is your most embarrassing moment", "what song describes your life",
    "what are your pet peeves", "do you prefer cats or dogs", "are you a good listener",
    "what scares you the most", "where do you see yourself in five years", "what is your zodiac sign",
    "when is your birthday", "what do you dream about", "how do you deal with stress",
    "what is the last thing that made you laugh", "what would you name your first child",
    "what do you miss the most", "who taught you how to cook", "what is your family like",
]

TOPICS = ["marriage", "kids", "love", "friendship", "getting old", "social media", "first dates",
          "long distance relationships", "your parents", "yourself", "your job", "religion", "tattoos"]
KINDS = ["music", "movies", "books", "food", "people", "jokes", "weather", "vacations", "clothes",
         "art", "games", "sports", "dates", "gifts"]
TELL = ["family", "childhood", "first love", "best friend", "hometown", "dreams", "hobbies", "day",
        "parents", "first kiss", "favorite memory", "weekend", "ex"]
EVER_FEEL = ["lonely", "sad", "tired", "bored", "happy", "loved", "jealous", "nervous", "scared",
             "homesick"]
PREFER = [("cats", "dogs"), ("summer", "winter"), ("coffee", "tea"), ("books", "movies"),
          ("the beach", "the mountains"), ("sunrise", "sunset"), ("pizza", "pasta"),
          ("city life", "country life"), ("staying in", "going out"), ("sweet", "salty")]

CITIES = [
    "boston", "seattle", "chicago", "denver", "miami", "austin", "london", "paris", "tokyo",
    "berlin", "toronto", "phoenix", "atlanta", "dallas", "portland", "madrid", "rome", "sydney",
]
DAYS = ["today", "tomorrow", "tonight", "this weekend", "on monday", "on friday", "next week"]
ROOMS = ["kitchen", "bedroom", "living room", "bathroom", "garage", "office", "hallway", "porch"]
ITEMS = [
    "milk", "eggs", "bread", "paper towels", "coffee", "batteries", "dish soap", "bananas", "rice",
    "dog food", "toothpaste", "olive oil", "orange juice", "cereal", "trash bags", "laundry detergent",
]
GENRES = ["jazz", "classical music", "country music", "rock music", "some relaxing music", "the news",
          "my workout playlist", "top hits", "the radio", "a podcast", "rain sounds", "lullabies"]
NAMES = ["mom", "dad", "john", "sarah", "the office", "grandma", "my brother", "my sister", "david", "emily"]
TASKS = ["take out the trash", "call the dentist", "pay the rent", "water the plants", "buy milk",
         "pick up the kids", "feed the cat", "walk the dog", "check the oven", "send the report",
         "renew my passport", "book a haircut"]
TIMES = ["at five", "at noon", "in ten minutes", "in an hour", "at seven thirty", "tomorrow morning",
         "at nine pm", "on saturday"]
COUNTRIES = ["france", "japan", "canada", "brazil", "kenya", "australia", "norway", "egypt", "peru",
             "india", "mexico", "italy", "spain", "chile", "greece"]
UNITS = [("cups", "gallon"), ("ounces", "pound"), ("feet", "mile"), ("teaspoons", "tablespoon"),
         ("meters", "kilometer"), ("inches", "foot"), ("grams", "kilogram"), ("minutes", "day"),
         ("seconds", "hour"), ("quarts", "gallon")]
CONVERT = [("fahrenheit", "celsius"), ("miles", "kilometers"), ("pounds", "kilograms"),
           ("dollars", "euros"), ("cups", "milliliters"), ("inches", "centimeters")]
LANDMARKS = ["the eiffel tower", "mount everest", "the empire state building", "the statue of liberty",
             "the golden gate bridge", "big ben", "the space needle"]
TEAMS = ["patriots", "lakers", "yankees", "red sox", "warriors", "cowboys", "bulls", "giants"]
STORES = ["target", "the pharmacy", "walmart", "the post office", "the bank", "costco", "the library"]
DEVICES = ["thermostat", "tv", "fan", "heater", "air conditioner", "coffee maker", "vacuum"]


def positives():
    out = set()
    for f in FAVORITES:
        out.add(f"what is your favorite {f}")
        out.add(f"what's your favorite {f}")
    for v in LIKES:
        out.add(f"do you like to {v}")
        out.add(f"how often do you {v}")
    for h in HAVE:
        out.add(f"do you have {h}")
    for e in EVER:
        out.add(f"have you ever {e}")
    for f in FEEL:
        out.add(f"what makes you {f}")
    for t in FREE:
        out.add(f"how do you spend your {t}")
    for a in ARE:
        out.add(f"are you {a}")
    for r in ROLE:
        out.add(f"who is your {r}")
    for cond, q in IF_COULD:
        out.add(f"if you could {cond} {q}")
    for f in FAVORITES:
        out.add(f"what is your least favorite {f}")
        out.add(f"what was your favorite {f} as a kid")
    for t in TOPICS:
        out.add(f"what do you think about {t}")
        out.add(f"how do you feel about {t}")
    for k in KINDS:
        out.add(f"what kind of {k} do you like")
        out.add(f"do you like {k}")
    for v in LIKES:
        out.add(f"do you know how to {v}")
    for a in TELL:
        out.add(f"tell me about your {a}")
    for x in EVER_FEEL:
        out.add(f"do you ever feel {x}")
    for a, b in PREFER:
        out.add(f"do you prefer {a} or {b}")
    out.update(OPEN)
    return sorted(out)


def negatives():
    out = set()
    for c, d in itertools.product(CITIES, DAYS):
        out.add(f"what is the weather in {c} {d}")
    for c in CITIES:
        out.add(f"weather in {c}")
        out.add(f"directions to {c}")
        out.add(f"what time is it in {c}")
        out.add(f"how far is {c} from here")
        out.add(f"find flights to {c}")
    for n in [1, 2, 3, 5, 10, 15, 20, 25, 30, 45]:
        out.add(f"set a timer for {n} minutes")
        out.add(f"set an alarm for {n} minutes from now")
    for r in ROOMS:
        out.add(f"turn off the {r} lights")
        out.add(f"turn on the {r} lights")
        out.add(f"dim the lights in the {r} to fifty percent")
    for i in ITEMS:
        out.add(f"buy more {i}")
        out.add(f"add {i} to my shopping list")
        out.add(f"order more {i}")
        out.add(f"how much does {i} cost")
    for g in GENRES:
        out.add(f"play {g}")
        out.add(f"play {g} in the kitchen")
    for n in NAMES:
        out.add(f"call {n}")
        out.add(f"send a message to {n}")
    for t, tm in itertools.product(TASKS, TIMES):
        out.add(f"remind me to {t} {tm}")
    for c in COUNTRIES:
        out.add(f"what is the capital of {c}")
        out.add(f"what is the population of {c}")
        out.add(f"what currency does {c} use")
    for a, b in UNITS:
        out.add(f"how many {a} are in a {b}")
    for a, b in CONVERT:
        for n in [10, 50, 100, 3]:
            out.add(f"convert {n} {a} to {b}")
    for l in LANDMARKS:
        out.add(f"how tall is {l}")
        out.add(f"when was {l} built")
    for t in TEAMS:
        out.add(f"who won the {t} game")
        out.add(f"when do the {t} play next")
    for s in STORES:
        out.add(f"when does {s} close")
        out.add(f"what are the hours for {s} {DAYS[1]}")
    for d in DEVICES:
        out.add(f"turn off the {d}")
        out.add(f"set the {d} to seventy two degrees")
    for a in range(2, 13):
        out.add(f"what is {a} times {a + 7}")
    out.update([
        "stop", "pause", "volume up", "next song", "turn the volume down", "read my messages",
        "what is on my calendar today", "cancel my alarm", "what is the traffic like", "resume the music",
        "skip this song", "shuffle my playlist", "lock the front door", "is the garage door open",
        "how do you spell necessary", "define the word ubiquitous", "read me the news",
        "what is the score of the game", "tell me the stock price of apple", "start the vacuum",
    ])
    return sorted(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pos, neg = positives(), negatives()
    rng.shuffle(pos)
    rng.shuffle(neg)
    with open(out / "positives.jsonl", "w") as f:
        for t in pos:
            f.write(json.dumps({"text": t, "label": "positive", "source": "synthetic"}) + "\n")
    with open(out / "negative_pool.jsonl", "w") as f:
        for t in neg:
            f.write(json.dumps({"text": t, "label": "negative", "source": "synthetic"}) + "\n")
    print(f"{len(pos)} positives, {len(neg)} negatives")


if __name__ == "__main__":
    main()
