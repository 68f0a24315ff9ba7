"""Two agents playing ping-pong, straight from block documents.

Builds the block programs the way the editor would serialize them, compiles
them to agent source, runs both agents for a second and prints the message
traffic.

    python demos/pingpong_local.py
"""

import time

from blockspeak.blocks import base_catalog, compile_blocks, parse_blocks_document
from blockspeak.lang import print_agent
from blockspeak.runtime import run_mas


def atom(block_id, name):
    return {"id": block_id, "type": "value_atom", "fields": {"NAME": name}}


def note_literal(block_id, ms):
    return {
        "id": block_id, "type": "literal",
        "fields": {"FUNCTOR": "note"},
        "mutation": {"args": "1"},
        "inputs": {"ARG0": {"id": block_id + "_ms", "type": "value_number",
                            "fields": {"NUM": ms}}},
    }


def wait_then_ask(block_id, receiver, goal):
    """wait(W) followed by asking a colleague to achieve a goal."""
    return {
        "id": block_id + "_wait", "type": "act_wait",
        "inputs": {"TIME": {"id": block_id + "_w", "type": "value_variable",
                            "fields": {"NAME": "W"}}},
        "next": {
            "id": block_id + "_send", "type": "comm_achieve",
            "inputs": {"RECEIVER": atom(block_id + "_to", receiver),
                       "GOAL": atom(block_id + "_goal", goal)},
        },
    }


def plan(block_id, trigger, receiver, goal):
    return {
        "id": block_id, "type": "plan",
        "fields": {"TRIGGER_KIND": "wants"},
        "inputs": {
            "TRIGGER": atom(block_id + "_trig", trigger),
            "CONTEXT": {
                "id": block_id + "_ctx", "type": "literal",
                "fields": {"FUNCTOR": "note"},
                "mutation": {"args": "1"},
                "inputs": {"ARG0": {"id": block_id + "_ctxw",
                                    "type": "value_variable",
                                    "fields": {"NAME": "W"}}},
            },
            "BODY": wait_then_ask(block_id, receiver, goal),
        },
    }


ping_doc = {
    "formatVersion": 1,
    "agentName": "ping",
    "topBlocks": [
        {"id": "b1", "type": "init_belief", "inputs": {"BELIEF": note_literal("n1", 50)}},
        {"id": "b2", "type": "init_goal", "inputs": {"GOAL": atom("g1", "start")}},
        plan("p1", "start", "pong", "pong"),
        plan("p2", "ping", "pong", "pong"),
    ],
}

pong_doc = {
    "formatVersion": 1,
    "agentName": "pong",
    "topBlocks": [
        {"id": "b1", "type": "init_belief", "inputs": {"BELIEF": note_literal("n1", 50)}},
        plan("p1", "pong", "ping", "ping"),
    ],
}


def main():
    catalog = base_catalog()
    ping = compile_blocks(parse_blocks_document(ping_doc), catalog)
    pong = compile_blocks(parse_blocks_document(pong_doc), catalog)

    print("--- generated source (ping) ---")
    print(print_agent(ping))
    print("--- generated source (pong) ---")
    print(print_agent(pong))

    handle = run_mas([("ping", ping), ("pong", pong)])
    time.sleep(1.0)
    handle.stop()

    trace = handle.container.message_trace
    print(f"--- {len(trace)} messages in one second ---")
    start = trace[0].at if trace else 0.0
    for t in trace:
        print(f"  t+{t.at - start:6.3f}s  {t.message.sender} -> "
              f"{t.message.receiver}  achieve {t.message.content.functor}")


if __name__ == "__main__":
    main()
