fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("BEHAVNET_LOG")).init();
    std::process::exit(behavnet::cli::run(std::env::args_os()));
}
