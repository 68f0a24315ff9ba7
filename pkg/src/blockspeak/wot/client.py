"""HTTP invocation of thing affordances and TD repository access.

Every request uses exactly the href/method/content type carried by the chosen
form; endpoints are never guessed. The client is stateless and safe for
concurrent use.
"""

from __future__ import annotations

import json
from typing import Optional

import requests

from ..errors import BlockspeakError
from .td import DEFAULT_METHODS, Form, ThingDescription, parse_td


class AffordanceError(BlockspeakError):
    """A thing interaction failed (HTTP error, timeout, bad payload...)."""

    def __init__(self, message: str, status: Optional[int] = None):
        super().__init__(message)
        self.status = status


class RepositoryError(BlockspeakError):
    """The TD repository is unreachable or rejected the request."""


def json_type_of(value) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    if isinstance(value, dict):
        return "object"
    return "null"


class WotClient:
    def __init__(self, timeout: float = 10.0, session: Optional[requests.Session] = None):
        self.timeout = timeout
        self.session = session or requests.Session()

    # -- low-level: shared by the td-based operations and the runtime
    # dispatcher (which has only the packed href/method from block mutations)

    def perform(self, op: str, href: str, method: Optional[str] = None,
                payload=None, content_type: str = "application/json"):
        """Issue one affordance request and return the decoded JSON body
        (None when the response has no body)."""
        method = method or DEFAULT_METHODS[op]
        headers = {"Accept": "application/json"}
        kwargs = {"headers": headers, "timeout": self.timeout}
        if payload is not None:
            kwargs["data"] = json.dumps(payload)
            headers["Content-Type"] = content_type
        try:
            resp = self._request_with_retry(method, href, payload is None, kwargs)
        except requests.Timeout as e:
            raise AffordanceError(f"timeout after {self.timeout}s: {method} {href}") from e
        except requests.RequestException as e:
            raise AffordanceError(f"request failed: {method} {href}: {e}") from e
        if not 200 <= resp.status_code < 300:
            raise AffordanceError(
                f"{method} {href} returned {resp.status_code}",
                status=resp.status_code)
        if not resp.content:
            return None
        ctype = resp.headers.get("Content-Type", "application/json")
        if "json" not in ctype:
            raise AffordanceError(f"{href} answered with non-JSON body ({ctype})")
        try:
            return resp.json()
        except ValueError as e:
            raise AffordanceError(f"{href} answered with unparseable JSON") from e

    def _request_with_retry(self, method, href, no_body_sent, kwargs):
        try:
            return self.session.request(method, href, **kwargs)
        except requests.ConnectionError:
            # one retry when the connection never opened; HTTP errors and
            # timeouts after a request went out are not retried
            return self.session.request(method, href, **kwargs)

    # -- td-based operations ------------------------------------------------

    def read_property(self, td: ThingDescription, name: str):
        prop = td.properties.get(name)
        if prop is None:
            raise AffordanceError(f"thing {td.title!r} has no property {name!r}")
        form = self._usable_form(td, prop.form_for("readproperty"), f"property {name!r}")
        return self.perform("readproperty", form.href, form.method_for("readproperty"),
                            content_type=form.content_type)

    def write_property(self, td: ThingDescription, name: str, payload):
        prop = td.properties.get(name)
        if prop is None:
            raise AffordanceError(f"thing {td.title!r} has no property {name!r}")
        if not prop.writable:
            raise AffordanceError(f"property {name!r} is not writable")
        if prop.value_type and json_type_of(payload) != prop.value_type:
            raise AffordanceError(
                f"payload type {json_type_of(payload)} does not match the "
                f"declared {prop.value_type} schema of property {name!r}")
        form = self._usable_form(td, prop.form_for("writeproperty"), f"property {name!r}")
        return self.perform("writeproperty", form.href, form.method_for("writeproperty"),
                            payload=payload, content_type=form.content_type)

    def invoke_action(self, td: ThingDescription, name: str, payload=None):
        action = td.actions.get(name)
        if action is None:
            raise AffordanceError(f"thing {td.title!r} has no action {name!r}")
        if payload is not None and action.input_type and \
                json_type_of(payload) != action.input_type:
            raise AffordanceError(
                f"payload type {json_type_of(payload)} does not match the "
                f"declared {action.input_type} input schema of action {name!r}")
        form = self._usable_form(td, action.form_for(), f"action {name!r}")
        return self.perform("invokeaction", form.href, form.method_for("invokeaction"),
                            payload=payload, content_type=form.content_type)

    def _usable_form(self, td: ThingDescription, form: Optional[Form], what: str) -> Form:
        if form is None:
            raise AffordanceError(f"{what} has no usable form")
        if not td.security_ok:
            raise AffordanceError(
                f"thing {td.title!r} requires an unsupported security scheme")
        return form

    # -- repository access ----------------------------------------------------

    def fetch_workspace_tds(self, repo_url: str, workspace: str):
        """All parseable TDs of a workspace, plus warnings for the rest."""
        url = f"{repo_url.rstrip('/')}/workspaces/{workspace}/things"
        try:
            resp = self.session.get(url, headers={"Accept": "application/json"},
                                    timeout=self.timeout)
        except requests.RequestException as e:
            raise RepositoryError(f"TD repository unreachable: {url}: {e}") from e
        if resp.status_code == 404:
            raise RepositoryError(f"unknown workspace {workspace!r}")
        if resp.status_code != 200:
            raise RepositoryError(f"{url} returned {resp.status_code}")
        try:
            docs = resp.json()
        except ValueError as e:
            raise RepositoryError(f"{url} returned unparseable JSON") from e
        if not isinstance(docs, list):
            raise RepositoryError(f"{url} did not return a TD array")
        tds, warnings = [], []
        for doc in docs:
            try:
                td, td_warnings = parse_td(doc)
            except BlockspeakError as e:
                warnings.append(f"skipping malformed TD: {e}")
                continue
            warnings.extend(td_warnings)
            tds.append(td)
        return tds, warnings
