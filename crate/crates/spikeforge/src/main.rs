use clap::Parser;
use spikeforge::alloc_counter::CountingAlloc;
use spikeforge::cli::{self, Cli};

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

fn main() {
    let cli = Cli::parse();
    if let Ok(Some(n)) = cli::thread_cap() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Err(f) = cli::execute(cli) {
        eprintln!("error: {}", f.message);
        std::process::exit(f.code);
    }
}
