"""Command-line client, driven against a live server on a local port.

The server fixture runs the real ASGI stack (uvicorn, worker thread and
all), so these double as an end-to-end smoke of the service wiring; the
CLI itself runs in-process through click's test runner.
"""

import json
import socket
import threading
import time

import httpx
import pytest
import uvicorn
from click.testing import CliRunner

from phylograph.api import HmacTokenVerifier, Settings, create_app
from phylograph.cli import main
from phylograph.graphstore import GraphStore

SECRET = "cli-secret"


@pytest.fixture(scope="module")
def server(tmp_path_factory):
    store = GraphStore(tmp_path_factory.mktemp("cli") / "store", fsync=False)
    app = create_app(Settings(token_secret=SECRET, worker_poll_interval=0.01),
                     store=store)
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    config = uvicorn.Config(app, host="127.0.0.1", port=port,
                            log_level="warning")
    instance = uvicorn.Server(config)
    thread = threading.Thread(target=instance.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    deadline = time.monotonic() + 15
    while time.monotonic() < deadline:
        try:
            if httpx.get(url + "/healthz", timeout=1.0).status_code == 200:
                break
        except httpx.HTTPError:
            pass
        time.sleep(0.05)
    else:
        raise RuntimeError("server did not come up")
    yield url
    instance.should_exit = True
    thread.join(10)
    store.close()


def run(server, *args, token=None, expect=0):
    if token is None:
        token = HmacTokenVerifier(SECRET).issue("cli-user")
    result = CliRunner().invoke(
        main, ["--url", server, "--token", token, *args])
    if expect is not None:
        assert result.exit_code == expect, result.output
    return result


def test_token_issuance_round_trips():
    result = CliRunner().invoke(
        main, ["token", "alice", "--secret", "k", "--role", "admin"])
    assert result.exit_code == 0, result.output
    issued = result.output.strip()
    assert HmacTokenVerifier("k").verify(issued) == ("alice", "admin")


def test_health(server):
    result = run(server, "health")
    assert result.output.strip() == "ok"


def test_unreachable_server_reported():
    result = CliRunner().invoke(
        main, ["--url", "http://127.0.0.1:9", "--token", "t", "health"])
    assert result.exit_code != 0
    assert "cannot reach" in result.output


def test_server_errors_surface_with_status(server):
    result = run(server, "projects", "show", "ghost", expect=None)
    assert result.exit_code != 0
    assert "404" in result.output


def test_missing_token_is_a_clean_failure(server):
    result = CliRunner().invoke(main, ["--url", server, "projects", "list"])
    assert result.exit_code != 0
    assert "401" in result.output


def test_full_workflow(server, tmp_path):
    result = run(server, "projects", "create", "wf", "--name", "workflow")
    assert json.loads(result.output)["id"] == "wf"

    result = run(server, "datasets", "--project", "wf", "create", "d1",
                 "--new-schema", "wf-schema:campy:l1,l2,l3")
    body = json.loads(result.output)
    assert body["loci"] == ["l1", "l2", "l3"]

    scope = ("--project", "wf", "--dataset", "d1")
    run(server, "profiles", *scope, "save", "A", "1,1,1")
    run(server, "profiles", *scope, "save", "B", "1,1,2")
    run(server, "profiles", *scope, "save", "C", "1,0,2")

    result = run(server, "profiles", *scope, "show", "C")
    assert json.loads(result.output)["alleles"] == ["1", None, "2"]

    result = run(server, "profiles", *scope, "export")
    lines = result.output.splitlines()
    assert lines[0] == "id\tl1\tl2\tl3"
    assert "C\t1\t0\t2" in lines  # missing slot encodes as 0

    result = run(server, "infer", *scope, "submit", "--id", "inf1",
                 "--lvs", "3")
    job_id = json.loads(result.output)["job_id"]
    result = run(server, "jobs", "show", job_id, "--wait")
    assert json.loads(result.output)["status"] == "succeeded"

    result = run(server, "infer", *scope, "show", "inf1")
    assert len(json.loads(result.output)["edges"]) == 2

    result = run(server, "viz", *scope, "--inference", "inf1",
                 "submit", "--id", "v1")
    job_id = json.loads(result.output)["job_id"]
    run(server, "jobs", "show", job_id, "--wait")
    result = run(server, "viz", *scope, "--inference", "inf1", "show", "v1")
    assert len(json.loads(result.output)["coordinates"]) == 3

    result = run(server, "projects", "list")
    ids = [p["id"] for p in json.loads(result.output)["items"]]
    assert "wf" in ids


def test_import_from_file_and_stdin(server, tmp_path):
    run(server, "projects", "create", "imp")
    run(server, "datasets", "--project", "imp", "create", "d1",
        "--new-schema", "imp-schema:t:x,y")
    scope = ("--project", "imp", "--dataset", "d1")

    table = tmp_path / "profiles.tsv"
    table.write_text("ST\tx\ty\nP1\t1\t2\nP2\t3\t4\n")
    result = run(server, "profiles", *scope, "import", str(table))
    assert json.loads(result.output)["created"] == 2

    token = HmacTokenVerifier(SECRET).issue("cli-user")
    result = CliRunner().invoke(
        main, ["--url", server, "--token", token, "profiles", *scope,
               "import", "-"],
        input="ST\tx\ty\nP3\t5\t6\n")
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["created"] == 1

    result = run(server, "profiles", *scope, "list")
    assert json.loads(result.output)["total"] == 3


def test_failed_job_exits_nonzero(server):
    run(server, "projects", "create", "fail")
    run(server, "datasets", "--project", "fail", "create", "d1",
        "--new-schema", "fail-schema:t:x,y")
    scope = ("--project", "fail", "--dataset", "d1")
    run(server, "profiles", *scope, "save", "A", "1,1")
    result = run(server, "infer", *scope, "submit", "--lvs", "9",
                 expect=None)
    assert result.exit_code == 0, result.output
    job_id = json.loads(result.output)["job_id"]
    result = run(server, "jobs", "show", job_id, "--wait", expect=None)
    assert result.exit_code == 1
    assert '"failed"' in result.output
