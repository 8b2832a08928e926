from src.cli.main import app

app(prog_name="qtradeoff")
