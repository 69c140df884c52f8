use clap::Parser;

fn main() {
    let cli = spin7_ddt::cli::Cli::parse();
    std::process::exit(spin7_ddt::cli::main_with(cli));
}
