fn main() {
    std::process::exit(trie_motifs::cli::run());
}
