fn main() { std::process::exit(wpbdd::cli::main()) }
