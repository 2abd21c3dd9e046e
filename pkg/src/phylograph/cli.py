"""Command-line client for the HTTP service (plus ``serve`` to run one).

Every data command is a thin wrapper over one endpoint: it sends the
request, pretty-prints the JSON (or raw TSV) on success, and exits
non-zero with the server's error message otherwise. Connection settings
come from ``--url``/``--token`` or the PHYLOGRAPH_URL / PHYLOGRAPH_TOKEN
environment variables.
"""

from __future__ import annotations

import json
import sys
import time

import click
import httpx


class Remote:
    def __init__(self, url: str, token: str | None):
        self.url = url.rstrip("/")
        self.token = token

    def request(self, method: str, path: str, **kwargs) -> httpx.Response:
        headers = dict(kwargs.pop("headers", {}))
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            response = httpx.request(method, self.url + path,
                                     headers=headers, timeout=30.0, **kwargs)
        except httpx.HTTPError as exc:
            raise click.ClickException(f"cannot reach {self.url}: {exc}")
        if response.status_code >= 400:
            try:
                message = response.json().get("message", response.text)
            except ValueError:
                message = response.text
            raise click.ClickException(
                f"{response.status_code}: {message}")
        return response


def emit(response: httpx.Response) -> None:
    content_type = response.headers.get("content-type", "")
    if content_type.startswith("application/json"):
        click.echo(json.dumps(response.json(), indent=2))
    else:
        click.echo(response.text, nl=False)


pass_remote = click.make_pass_decorator(Remote)


@click.group()
@click.option("--url", envvar="PHYLOGRAPH_URL",
              default="http://127.0.0.1:8000", show_default=True,
              help="Service base URL.")
@click.option("--token", envvar="PHYLOGRAPH_TOKEN", default=None,
              help="Bearer token (see `phylograph token`).")
@click.pass_context
def main(ctx: click.Context, url: str, token: str | None) -> None:
    """Client for a phylograph service."""
    ctx.obj = Remote(url, token)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="YAML config file.")
def serve(config_path: str | None) -> None:
    """Run the HTTP service (blocking)."""
    import uvicorn

    from .api import create_app, load_settings

    settings = load_settings(config_path)
    uvicorn.run(create_app(settings), host=settings.host, port=settings.port,
                log_level="info")


@main.command()
@click.argument("subject")
@click.option("--secret", envvar="PHYLOGRAPH_TOKEN_SECRET", required=True,
              help="HMAC secret the server was configured with.")
@click.option("--role", default="user", show_default=True,
              type=click.Choice(["user", "admin"]))
@click.option("--ttl", default=3600.0, show_default=True,
              help="Lifetime in seconds.")
def token(subject: str, secret: str, role: str, ttl: float) -> None:
    """Issue a signed bearer token for SUBJECT."""
    from .api import HmacTokenVerifier

    click.echo(HmacTokenVerifier(secret).issue(subject, role, ttl))


@main.command()
@pass_remote
def health(remote: Remote) -> None:
    """Check service liveness."""
    click.echo(remote.request("GET", "/healthz").text)


# -- projects ---------------------------------------------------------------

@main.group()
def projects() -> None:
    """Project CRUD."""


@projects.command("list")
@click.option("--page", default=0, show_default=True)
@click.option("--limit", default=None, type=int)
@click.option("--deprecated", is_flag=True)
@pass_remote
def projects_list(remote: Remote, page: int, limit: int | None,
                  deprecated: bool) -> None:
    params: dict = {"page": page, "deprecated": deprecated}
    if limit is not None:
        params["limit"] = limit
    emit(remote.request("GET", "/projects", params=params))


@projects.command("create")
@click.argument("project_id")
@click.option("--name", default="")
@click.option("--visibility", default="public", show_default=True,
              type=click.Choice(["public", "private"]))
@click.option("--member", "members", multiple=True,
              help="May be given several times.")
@pass_remote
def projects_create(remote: Remote, project_id: str, name: str,
                    visibility: str, members: tuple[str, ...]) -> None:
    emit(remote.request("POST", "/projects", json={
        "id": project_id, "name": name, "visibility": visibility,
        "members": list(members)}))


@projects.command("show")
@click.argument("project_id")
@click.option("--deprecated", is_flag=True)
@pass_remote
def projects_show(remote: Remote, project_id: str, deprecated: bool) -> None:
    emit(remote.request("GET", f"/projects/{project_id}",
                        params={"deprecated": deprecated}))


@projects.command("update")
@click.argument("project_id")
@click.option("--name", default=None)
@click.option("--visibility", default=None,
              type=click.Choice(["public", "private"]))
@click.option("--member", "members", multiple=True)
@pass_remote
def projects_update(remote: Remote, project_id: str, name: str | None,
                    visibility: str | None,
                    members: tuple[str, ...]) -> None:
    body: dict = {}
    if name is not None:
        body["name"] = name
    if visibility is not None:
        body["visibility"] = visibility
    if members:
        body["members"] = list(members)
    emit(remote.request("PUT", f"/projects/{project_id}", json=body))


@projects.command("delete")
@click.argument("project_id")
@pass_remote
def projects_delete(remote: Remote, project_id: str) -> None:
    remote.request("DELETE", f"/projects/{project_id}")
    click.echo(f"deleted {project_id}")


# -- datasets ---------------------------------------------------------------

@main.group()
@click.option("--project", "project_id", required=True, envvar="PHYLOGRAPH_PROJECT")
@click.pass_context
def datasets(ctx: click.Context, project_id: str) -> None:
    """Dataset CRUD within one project."""
    ctx.obj = (ctx.obj, project_id)


@datasets.command("list")
@click.option("--page", default=0, show_default=True)
@click.option("--limit", default=None, type=int)
@click.pass_obj
def datasets_list(obj, page: int, limit: int | None) -> None:
    remote, project_id = obj
    params: dict = {"page": page}
    if limit is not None:
        params["limit"] = limit
    emit(remote.request("GET", f"/projects/{project_id}/datasets",
                        params=params))


@datasets.command("create")
@click.argument("dataset_id")
@click.option("--description", default="")
@click.option("--schema-id", default=None,
              help="Reuse an existing schema by id.")
@click.option("--new-schema", default=None,
              help="Create a schema inline: '<id>:<taxon>:<locus,locus,…>'.")
@click.pass_obj
def datasets_create(obj, dataset_id: str, description: str,
                    schema_id: str | None, new_schema: str | None) -> None:
    remote, project_id = obj
    body: dict = {"id": dataset_id, "description": description}
    if schema_id is not None:
        body["schema_id"] = schema_id
    if new_schema is not None:
        try:
            sid, taxon, loci = new_schema.split(":", 2)
        except ValueError:
            raise click.BadParameter(
                "expected '<id>:<taxon>:<locus,locus,…>'")
        body["schema"] = {"id": sid, "taxon": taxon,
                          "loci": loci.split(",")}
    emit(remote.request("POST", f"/projects/{project_id}/datasets",
                        json=body))


@datasets.command("show")
@click.argument("dataset_id")
@click.pass_obj
def datasets_show(obj, dataset_id: str) -> None:
    remote, project_id = obj
    emit(remote.request("GET",
                        f"/projects/{project_id}/datasets/{dataset_id}"))


@datasets.command("delete")
@click.argument("dataset_id")
@click.pass_obj
def datasets_delete(obj, dataset_id: str) -> None:
    remote, project_id = obj
    remote.request("DELETE", f"/projects/{project_id}/datasets/{dataset_id}")
    click.echo(f"deleted {dataset_id}")


# -- profiles ----------------------------------------------------------------

def _dataset_path(project_id: str, dataset_id: str) -> str:
    return f"/projects/{project_id}/datasets/{dataset_id}"


@main.group()
@click.option("--project", "project_id", required=True,
              envvar="PHYLOGRAPH_PROJECT")
@click.option("--dataset", "dataset_id", required=True,
              envvar="PHYLOGRAPH_DATASET")
@click.pass_context
def profiles(ctx: click.Context, project_id: str, dataset_id: str) -> None:
    """Profile CRUD and TSV import/export within one dataset."""
    ctx.obj = (ctx.obj, _dataset_path(project_id, dataset_id))


@profiles.command("list")
@click.option("--page", default=0, show_default=True)
@click.option("--limit", default=None, type=int)
@click.option("--deprecated", is_flag=True)
@click.pass_obj
def profiles_list(obj, page: int, limit: int | None,
                  deprecated: bool) -> None:
    remote, base = obj
    params: dict = {"page": page, "deprecated": deprecated}
    if limit is not None:
        params["limit"] = limit
    emit(remote.request("GET", base + "/profiles", params=params))


@profiles.command("save")
@click.argument("profile_id")
@click.argument("alleles")
@click.pass_obj
def profiles_save(obj, profile_id: str, alleles: str) -> None:
    """Create or update PROFILE_ID from comma-separated ALLELES
    (empty slot or 0 = missing)."""
    remote, base = obj
    values = [None if a in ("", "0") else a for a in alleles.split(",")]
    emit(remote.request("POST", base + "/profiles",
                        json={"id": profile_id, "alleles": values}))


@profiles.command("show")
@click.argument("profile_id")
@click.option("--version", default=None, type=int)
@click.pass_obj
def profiles_show(obj, profile_id: str, version: int | None) -> None:
    remote, base = obj
    params = {} if version is None else {"version": version}
    emit(remote.request("GET", base + f"/profiles/{profile_id}",
                        params=params))


@profiles.command("delete")
@click.argument("profile_id")
@click.pass_obj
def profiles_delete(obj, profile_id: str) -> None:
    remote, base = obj
    remote.request("DELETE", base + f"/profiles/{profile_id}")
    click.echo(f"deleted {profile_id}")


@profiles.command("import")
@click.argument("table", type=click.File("r"))
@click.pass_obj
def profiles_import(obj, table) -> None:
    """Bulk-import a TSV profile table (use '-' for stdin)."""
    remote, base = obj
    emit(remote.request(
        "POST", base + "/profiles/import", content=table.read(),
        headers={"Content-Type": "text/tab-separated-values"}))


@profiles.command("export")
@click.pass_obj
def profiles_export(obj) -> None:
    """Print the dataset as a TSV profile table."""
    remote, base = obj
    emit(remote.request("GET", base + "/profiles/export"))


# -- analyses ----------------------------------------------------------------

@main.group()
@click.option("--project", "project_id", required=True,
              envvar="PHYLOGRAPH_PROJECT")
@click.option("--dataset", "dataset_id", required=True,
              envvar="PHYLOGRAPH_DATASET")
@click.pass_context
def infer(ctx: click.Context, project_id: str, dataset_id: str) -> None:
    """Submit and fetch inference runs."""
    ctx.obj = (ctx.obj, _dataset_path(project_id, dataset_id))


@infer.command("submit")
@click.option("--algorithm", default="goeburst", show_default=True)
@click.option("--lvs", default=None, type=int,
              help="Tie-break depth (algorithm parameter).")
@click.option("--id", "inference_id", default=None,
              help="Inference id to (re)compute; otherwise allocated.")
@click.pass_obj
def infer_submit(obj, algorithm: str, lvs: int | None,
                 inference_id: str | None) -> None:
    remote, base = obj
    body: dict = {"algorithm": algorithm, "parameters": {}}
    if lvs is not None:
        body["parameters"]["lvs"] = lvs
    if inference_id is not None:
        body["id"] = inference_id
    emit(remote.request("POST", base + "/inferences", json=body))


@infer.command("show")
@click.argument("inference_id")
@click.pass_obj
def infer_show(obj, inference_id: str) -> None:
    remote, base = obj
    emit(remote.request("GET", base + f"/inferences/{inference_id}"))


@main.group()
@click.option("--project", "project_id", required=True,
              envvar="PHYLOGRAPH_PROJECT")
@click.option("--dataset", "dataset_id", required=True,
              envvar="PHYLOGRAPH_DATASET")
@click.option("--inference", "inference_id", required=True)
@click.pass_context
def viz(ctx: click.Context, project_id: str, dataset_id: str,
        inference_id: str) -> None:
    """Submit and fetch layouts over one inference."""
    base = _dataset_path(project_id, dataset_id)
    ctx.obj = (ctx.obj, base + f"/inferences/{inference_id}")


@viz.command("submit")
@click.option("--algorithm", default="radial", show_default=True)
@click.option("--id", "visualization_id", default=None)
@click.pass_obj
def viz_submit(obj, algorithm: str, visualization_id: str | None) -> None:
    remote, base = obj
    body: dict = {"algorithm": algorithm}
    if visualization_id is not None:
        body["id"] = visualization_id
    emit(remote.request("POST", base + "/visualizations", json=body))


@viz.command("show")
@click.argument("visualization_id")
@click.pass_obj
def viz_show(obj, visualization_id: str) -> None:
    remote, base = obj
    emit(remote.request("GET", base + f"/visualizations/{visualization_id}"))


@main.group()
def jobs() -> None:
    """Inspect queued and finished jobs."""


@jobs.command("show")
@click.argument("job_id")
@click.option("--wait", is_flag=True,
              help="Poll until the job finishes.")
@click.option("--timeout", default=60.0, show_default=True)
@pass_remote
def jobs_show(remote: Remote, job_id: str, wait: bool,
              timeout: float) -> None:
    deadline = time.monotonic() + timeout
    while True:
        response = remote.request("GET", f"/jobs/{job_id}")
        body = response.json()
        if not wait or body["status"] in ("succeeded", "failed"):
            emit(response)
            if body["status"] == "failed":
                sys.exit(1)
            return
        if time.monotonic() >= deadline:
            raise click.ClickException(
                f"job {job_id} still {body['status']} after {timeout:.0f}s")
        time.sleep(0.2)


if __name__ == "__main__":
    main()
