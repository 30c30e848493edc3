class Translation(object):
    START_TEXT = "streamrec {command}: data={data_dir} out={out_dir}"
    DONE_TEXT = "streamrec {command}: done in {elapsed}"
    ERROR_TEXT = "streamrec {command}: {error}"

    DOWNLOAD_START = "Downloading {url}\nSize: {size}"
    DOWNLOAD_PROGRESS = "#"
    DOWNLOAD_PENDING = "."
    PROGRESS = "{0}% of {2} ({1}) at {3}/s, eta {4}"
    DOWNLOAD_DONE = "Downloaded {size} to {path} in {elapsed}; extracted {files} files into {target}"

    DATASET_REPORT = """Dataset {data_dir}
Ratings: {ratings}
Users: {users}
Rated movies: {rated_movies}
Movies (catalogue): {movies}
Tag events: {tags}
Time range: {first_time} .. {last_time}"""

    STATUS_TEXT = """Disk: {total} total, {used} used ({disk}%), {free} free
CPU: {cpu}%
RAM: {ram}%
Threads: {threads}"""

    RESOURCE_TEXT = "resources: rss {rss}, cpu {cpu}%"

    STREAM_WRITTEN = "Wrote {links} links ({users} users, {items} items, delta={delta}s) to {path}"
    CLIQUES_WRITTEN = "Wrote {count} cliques (balance >= {balance}, {samples} trials, seed {seed}) to {path}"

    REPORT_HEADER = """streamrec report
NDCG@{k}: mean over users of per-user NDCG; relevance = true rating; ties broken by item id.
Predictions: bias baseline (global mean + user offset + item offset), clamped to [0.5, 5.0].
Options: {options}
"""
    REPORT_FOLD = ("fold {fold}: train={n_train} test={n_test} | test mae={mae:.6f} rmse={rmse:.6f} "
                   "ndcg={ndcg:.6f} | train mae={train_mae:.6f} rmse={train_rmse:.6f} ndcg={train_ndcg:.6f} "
                   "| global-mean rmse={global_mean_rmse:.6f}")
    REPORT_AGGREGATE = "{name}: mean={mean:.6f} std={std:.6f}"
    BASELINE_LOSES = "fold {fold}: baseline rmse {rmse:.6f} does not beat the global mean ({oracle:.6f})"

    EVALUATE_TEXT = """Predictions: {path} ({rows} rows, {users} users)
MAE: {mae:.6f}
RMSE: {rmse:.6f}
NDCG@{k}: {ndcg:.6f}"""
