from qtol.cli import entrypoint

entrypoint()
