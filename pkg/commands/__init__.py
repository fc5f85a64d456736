# Subcommand handlers; each module exposes run(config) -> exit code
