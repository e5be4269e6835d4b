fn main() {
    std::process::exit(spinboson::toolcli::cli::main_entry());
}
