"""The whole platform in one process: TD repository, runtime service, a mock
lamp, and an agent built from thing blocks that switches the lamp on.

    python demos/platform_session.py
"""

import json
import tempfile
import threading
import time

import requests
import uvicorn

from blockspeak.blocks import blocks_from_td
from blockspeak.services import create_runtime_app, create_tdrepo_app
from blockspeak.wot import MockLamp, parse_td


def serve(app):
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    return server, f"http://127.0.0.1:{port}"


def main():
    with MockLamp(on=False) as lamp, \
            tempfile.TemporaryDirectory() as repo_data, \
            tempfile.TemporaryDirectory() as runtime_data:
        repo_server, repo_url = serve(create_tdrepo_app(repo_data))
        runtime_server, runtime_url = serve(
            create_runtime_app(runtime_data, td_repo_url=repo_url))

        print(f"td repository at {repo_url}, runtime at {runtime_url}")
        requests.put(f"{repo_url}/workspaces/lab")
        requests.post(f"{repo_url}/workspaces/lab/things", json=lamp.td())
        listing = requests.get(f"{repo_url}/workspaces/lab/things").json()
        print(f"workspace 'lab' now serves {len(listing)} TD(s)")

        td, _ = parse_td(json.dumps(listing[0]))
        category, _ = blocks_from_td(td)
        read_on = category.blocks[0]
        toggle = category.blocks[2]

        # the agent a user would click together: read the lamp state and
        # toggle it when it is off
        switch_on = {
            "formatVersion": 1,
            "agentName": "switcher",
            "topBlocks": [
                {"id": "g", "type": "init_goal",
                 "inputs": {"GOAL": {"id": "ga", "type": "value_atom",
                                     "fields": {"NAME": "check"}}}},
                {"id": "p1", "type": "plan", "fields": {"TRIGGER_KIND": "wants"},
                 "inputs": {
                     "TRIGGER": {"id": "t1", "type": "value_atom",
                                 "fields": {"NAME": "check"}},
                     "BODY": {
                         "id": "r1", "type": read_on.id,
                         "mutation": dict(read_on.mutation_defaults),
                         "inputs": {"OUT": {"id": "r1v", "type": "value_variable",
                                            "fields": {"NAME": "Doc"}}},
                         "next": {
                             "id": "j1", "type": "act_json_get",
                             "inputs": {
                                 "DOC": {"id": "j1d", "type": "value_variable",
                                         "fields": {"NAME": "Doc"}},
                                 "PATH": {"id": "j1p", "type": "value_string",
                                          "fields": {"TEXT": "value"}},
                                 "OUT": {"id": "j1v", "type": "value_variable",
                                         "fields": {"NAME": "V"}}},
                             "next": {"id": "a1", "type": "act_achieve",
                                      "inputs": {"GOAL": {
                                          "id": "a1g", "type": "literal",
                                          "fields": {"FUNCTOR": "react"},
                                          "mutation": {"args": "1"},
                                          "inputs": {"ARG0": {
                                              "id": "a1v", "type": "value_variable",
                                              "fields": {"NAME": "V"}}}}}}}}}},
                {"id": "p2", "type": "plan", "fields": {"TRIGGER_KIND": "wants"},
                 "inputs": {
                     "TRIGGER": {"id": "t2", "type": "literal",
                                 "fields": {"FUNCTOR": "react"},
                                 "mutation": {"args": "1"},
                                 "inputs": {"ARG0": {"id": "t2f",
                                                     "type": "value_boolean",
                                                     "fields": {"BOOL": "false"}}}},
                     "BODY": {"id": "i1", "type": toggle.id,
                              "mutation": dict(toggle.mutation_defaults)}}},
            ],
        }

        preview = requests.post(f"{runtime_url}/compile", json=switch_on).json()
        print("--- live code preview ---")
        print(preview["source"])

        requests.put(f"{runtime_url}/agents/switcher",
                     json={"sourceKind": "blocks", "body": switch_on})
        requests.put(f"{runtime_url}/configurations/demo",
                     json={"entries": [{"template": "switcher"}],
                           "workspace": "lab"})
        run = requests.post(f"{runtime_url}/runs",
                            json={"configuration": "demo"}).json()
        print(f"run {run['runId']} started; waiting for the lamp...")
        deadline = time.time() + 5.0
        while not lamp.on and time.time() < deadline:
            time.sleep(0.05)
        print(f"lamp is now {'ON' if lamp.on else 'still off (!)'}")

        requests.delete(f"{runtime_url}/runs/{run['runId']}")
        log = requests.get(f"{runtime_url}/runs/{run['runId']}/log").json()
        print("--- last log lines ---")
        for line in log["lines"][-5:]:
            print(" ", line)

        repo_server.should_exit = True
        runtime_server.should_exit = True


if __name__ == "__main__":
    main()
