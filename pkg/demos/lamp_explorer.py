"""Explore a web thing from Python: parse its Thing Description, see which
blocks it would contribute to the editor palette, and poke its affordances.

    python demos/lamp_explorer.py
"""

import json

from blockspeak.blocks import blocks_from_td
from blockspeak.wot import MockLamp, WotClient, parse_td


def main():
    with MockLamp(on=False) as lamp:
        client = WotClient()
        td_doc = client.perform("readproperty", lamp.base_url + "/td", "GET")
        td, warnings = parse_td(json.dumps(td_doc))
        print(f"thing: {td.title!r} ({td.id})")
        for w in warnings:
            print(f"  warning: {w}")

        category, _ = blocks_from_td(td)
        print(f"palette category {category.name!r}:")
        for block in category.blocks:
            print(f"  [{block.id}] {block.label!r} -> "
                  f"{block.mutation_defaults['httpMethod']} "
                  f"{block.mutation_defaults['href']}")

        print("reading 'on':", client.read_property(td, "on"))
        print("invoking 'toggle'...")
        client.invoke_action(td, "toggle")
        print("reading 'on':", client.read_property(td, "on"))
        print("writing on=false...")
        client.write_property(td, "on", False)
        print("reading 'on':", client.read_property(td, "on"))

        print("--- requests the lamp saw ---")
        for r in lamp.request_log:
            if r.path != "/td":
                print(f"  {r.method:4} {r.path}  accept={r.accept}")


if __name__ == "__main__":
    main()
