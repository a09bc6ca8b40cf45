fn main() {
    std::process::exit(spellcorr::cli::run());
}
