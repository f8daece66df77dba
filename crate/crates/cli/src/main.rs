use clap::Parser;

fn main() {
    let cli = costlens_cli::Cli::parse();
    let code = costlens_cli::main_with(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
