// Placeholder CLI entry point; subcommands are wired once the pipeline lands.
int main() { return 0; }
