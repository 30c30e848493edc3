from config import NDCG_K
from database.store import read_predictions
from functions.commands import argument, on_command
from functions.metrics import score
from translation import Translation


@on_command("evaluate", help="score an external model's user,item,predicted,truth CSV", arguments=(
    argument("--predictions", required=True),
    argument("--k", type=int, default=NDCG_K),
))
def evaluate_handler(_, args):
    predictions = read_predictions(args.predictions)
    result = score(predictions, args.k)
    print(Translation.EVALUATE_TEXT.format(path=args.predictions, rows=len(predictions),
                                           users=predictions.frame["user"].nunique(), k=args.k, **result))
