use clap::Parser;

fn main() {
    let cli = ccm_cli::Cli::parse();
    let code = ccm_cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
