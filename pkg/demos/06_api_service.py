#!/usr/bin/env python3
"""The HTTP API in action: /translate, /suggest, /complete, /health.

Runs the service in-process and walks through each endpoint the way a CAT
editor would call them.
"""

import json

from fastapi.testclient import TestClient
from toycorpus import train_demo_model

from wlac.service import ModelRegistry, ServiceConfig, create_app

vocab, model = train_demo_model()
registry = ModelRegistry()
registry.add("toy", "en", model)
client = TestClient(create_app(registry, ServiceConfig()))


def show(title, response):
    print(f"\n-- {title} --")
    print(json.dumps(response.json(), ensure_ascii=False, indent=2))


show("GET /health", client.get("/health"))

show("POST /translate", client.post("/translate", json={
    "sentences": ["ka lo mi ru ta", "ve zo pa"],
    "source_language": "toy", "target_language": "en"}))

show("POST /suggest (click after 'arbol')", client.post("/suggest", json={
    "sentence": "ka lo mi ru ta", "prefix": "arbol",
    "source_language": "toy", "target_language": "en"}))

show("POST /complete (user typed 'c')", client.post("/complete", json={
    "source": "ka lo mi ru ta", "left_context": "", "right_context": "",
    "typed": "c", "source_language": "toy", "target_language": "en"}))

print("\nerror semantics:")
r = client.post("/translate", json={"sentences": [], "source_language": "toy",
                                    "target_language": "en"})
print(f"  empty sentence list -> HTTP {r.status_code}")
r = client.post("/translate", json={"sentences": ["ka"], "source_language": "toy",
                                    "target_language": "fr"})
print(f"  unknown pair        -> HTTP {r.status_code}")
r = client.post("/complete", json={"source": "ka", "typed": "",
                                   "source_language": "toy",
                                   "target_language": "en"})
print(f"  empty typed         -> HTTP {r.status_code}")
